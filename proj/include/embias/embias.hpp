#pragma once

#include "embias/embedding_store.hpp"
#include "embias/error.hpp"
#include "embias/realworld_data.hpp"
#include "embias/report.hpp"
#include "embias/stimuli.hpp"
#include "embias/weat.hpp"
#include "embias/wefat.hpp"
