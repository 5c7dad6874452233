#pragma once

// Built-in stimulus sets, JSON test specs, and vocabulary resolution with
// seeded rebalancing of the target sets.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "embias/embedding_store.hpp"
#include "embias/error.hpp"

namespace embias {

struct WordSet {
  std::string label;
  std::vector<std::string> words;
  // Alternate spellings tried, in order, when a word misses.
  std::map<std::string, std::vector<std::string>> aliases;

  friend bool operator==(const WordSet&, const WordSet&) = default;
};

struct WeatSpec {
  std::string test_id;
  WordSet X, Y, A, B;
  std::string source;

  friend bool operator==(const WeatSpec&, const WeatSpec&) = default;
};

struct WefatSpec {
  std::string test_id;
  WordSet targets;
  WordSet A, B;
  std::string source;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view w = csv.substr(start, end - start);
    while (!w.empty() && w.front() == ' ') w.remove_prefix(1);
    while (!w.empty() && w.back() == ' ') w.remove_suffix(1);
    if (!w.empty()) out.emplace_back(w);
    start = end + 1;
  }
  return out;
}

inline WordSet make_set(std::string label, std::string_view words) {
  return WordSet{std::move(label), split_words(words), {}};
}

// Duplicates inside one set; empty result means none.
inline std::vector<std::string> duplicates_in(const WordSet& s) {
  std::set<std::string> seen;
  std::vector<std::string> dups;
  for (const auto& w : s.words) {
    if (!seen.insert(w).second) dups.push_back(w);
  }
  return dups;
}

inline std::vector<std::string> intersection(const WordSet& a, const WordSet& b) {
  std::set<std::string> in_a(a.words.begin(), a.words.end());
  std::vector<std::string> common;
  for (const auto& w : b.words) {
    if (in_a.contains(w)) common.push_back(w);
  }
  return common;
}

inline std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ", ";
    out += w;
  }
  return out;
}

}  // namespace detail

inline void validate(const WordSet& s) {
  if (s.words.empty()) throw UsageError("word set '" + s.label + "' is empty");
  if (auto d = detail::duplicates_in(s); !d.empty()) {
    throw UsageError("word set '" + s.label + "' repeats: " + detail::join(d));
  }
}

inline void validate(const WeatSpec& spec) {
  for (const WordSet* s : {&spec.X, &spec.Y, &spec.A, &spec.B}) validate(*s);
  if (auto c = detail::intersection(spec.X, spec.Y); !c.empty()) {
    throw UsageError("target sets X and Y share words: " + detail::join(c));
  }
  if (auto c = detail::intersection(spec.A, spec.B); !c.empty()) {
    throw UsageError("attribute sets A and B share words: " + detail::join(c));
  }
}

// ---------------------------------------------------------------------------
// Built-in stimuli

namespace stimuli_data {

inline constexpr std::string_view kFlowers =
    "aster, clover, hyacinth, marigold, poppy, azalea, crocus, iris, orchid, rose, bluebell, "
    "daffodil, lilac, pansy, tulip, buttercup, daisy, lily, peony, violet, carnation, gladiola, "
    "magnolia, petunia, zinnia";
inline constexpr std::string_view kInsects =
    "ant, caterpillar, flea, locust, spider, bedbug, centipede, fly, maggot, tarantula, bee, "
    "cockroach, gnat, mosquito, termite, beetle, cricket, hornet, moth, wasp, blackfly, "
    "dragonfly, horsefly, roach, weevil";
inline constexpr std::string_view kPleasant =
    "caress, freedom, health, love, peace, cheer, friend, heaven, loyal, pleasure, diamond, "
    "gentle, honest, lucky, rainbow, diploma, gift, honor, miracle, sunrise, family, happy, "
    "laughter, paradise, vacation";
inline constexpr std::string_view kUnpleasant =
    "abuse, crash, filth, murder, sickness, accident, death, grief, poison, stink, assault, "
    "disaster, hatred, pollute, tragedy, divorce, jail, poverty, ugly, cancer, kill, rotten, "
    "vomit, agony, prison";
inline constexpr std::string_view kInstruments =
    "bagpipe, cello, guitar, lute, trombone, banjo, clarinet, harmonica, mandolin, trumpet, "
    "bassoon, drum, harp, oboe, tuba, bell, fiddle, harpsichord, piano, viola, bongo, flute, "
    "horn, saxophone, violin";
inline constexpr std::string_view kWeapons =
    "arrow, club, gun, missile, spear, axe, dagger, harpoon, pistol, sword, blade, dynamite, "
    "hatchet, rifle, tank, bomb, firearm, knife, shotgun, teargas, cannon, grenade, mace, "
    "slingshot, whip";
// The name-valence experiment uses a variant unpleasant list (bomb, evil).
inline constexpr std::string_view kUnpleasantNames =
    "abuse, crash, filth, murder, sickness, accident, death, grief, poison, stink, assault, "
    "disaster, hatred, pollute, tragedy, bomb, divorce, jail, poverty, ugly, cancer, evil, "
    "kill, rotten, vomit";

// Greenwald et al. names as retained after deletion of low-frequency names.
inline constexpr std::string_view kEuropeanNames =
    "Adam, Harry, Josh, Roger, Alan, Frank, Justin, Ryan, Andrew, Jack, Matthew, Stephen, Brad, "
    "Greg, Paul, Jonathan, Peter, Amanda, Courtney, Heather, Melanie, Katie, Betsy, Kristin, "
    "Nancy, Stephanie, Ellen, Lauren, Colleen, Emily, Megan, Rachel";
inline constexpr std::string_view kAfricanNames =
    "Alonzo, Jamel, Theo, Alphonse, Jerome, Leroy, Torrance, Darnell, Lamar, Lionel, Tvree, "
    "Deion, Lamont, Malik, Terrence, Tyrone, Lavon, Marcellus, Wardell, Nichelle, Shereen, "
    "Ebony, Latisha, Shaniqua, Jasmine, Tanisha, Tia, Lakisha, Latoya, Yolanda, Malika, Yvette";

// The same lists before deletion.
inline constexpr std::string_view kEuropeanNamesFull =
    "Adam, Chip, Harry, Josh, Roger, Alan, Frank, Ian, Justin, Ryan, Andrew, Fred, Jack, "
    "Matthew, Stephen, Brad, Greg, Jed, Paul, Todd, Brandon, Hank, Jonathan, Peter, Wilbur, "
    "Amanda, Courtney, Heather, Melanie, Sara, Amber, Crystal, Katie, Meredith, Shannon, Betsy, "
    "Donna, Kristin, Nancy, Stephanie, Bobbie-Sue, Ellen, Lauren, Peggy, Sue-Ellen, Colleen, "
    "Emily, Megan, Rachel, Wendy";
inline constexpr std::string_view kAfricanNamesFull =
    "Alonzo, Jamel, Lerone, Percell, Theo, Alphonse, Jerome, Leroy, Rasaan, Torrance, Darnell, "
    "Lamar, Lionel, Rashaun, Tvree, Deion, Lamont, Malik, Terrence, Tyrone, Everol, Lavon, "
    "Marcellus, Terryl, Wardell, Aiesha, Lashelle, Nichelle, Shereen, Temeka, Ebony, Latisha, "
    "Shaniqua, Tameisha, Teretha, Jasmine, Latonya, Shanise, Tanisha, Tia, Lakisha, Latoya, "
    "Sharise, Tashika, Yolanda, Lashandra, Malika, Shavonn, Tawanda, Yvette";
inline constexpr std::string_view kDeletedEuropeanNames =
    "Chip, Ian, Fred, Jed, Todd, Brandon, Hank, Wilbur, Sara, Amber, Crystal, Meredith, "
    "Shannon, Donna, Bobbie-Sue, Peggy, Sue-Ellen, Wendy";
inline constexpr std::string_view kDeletedAfricanNames =
    "Lerone, Percell, Rasaan, Rashaun, Everol, Terryl, Aiesha, Lashelle, Temeka, Tameisha, "
    "Teretha, Latonya, Shanise, Sharise, Tashika, Lashandra, Shavonn, Tawanda";

// Bertrand & Mullainathan names, after deletion.
inline constexpr std::string_view kBertrandEuropean =
    "Brad, Brendan, Geoffrey, Greg, Brett, Matthew, Neil, Todd, Allison, Anne, Carrie, Emily, "
    "Jill, Laurie, Meredith, Sarah";
inline constexpr std::string_view kBertrandAfrican =
    "Darnell, Hakim, Jermaine, Kareem, Jamal, Leroy, Rasheed, Tyrone, Aisha, Ebony, Keisha, "
    "Kenya, Lakisha, Latoya, Tamika, Tanisha";
inline constexpr std::string_view kNosekPleasant =
    "joy, love, peace, wonderful, pleasure, friend, laughter, happy";
inline constexpr std::string_view kNosekUnpleasant =
    "agony, terrible, horrible, nasty, evil, war, awful, failure";

inline constexpr std::string_view kMaleNames = "John, Paul, Mike, Kevin, Steve, Greg, Jeff, Bill";
inline constexpr std::string_view kFemaleNames = "Amy, Joan, Lisa, Sarah, Diana, Kate, Ann, Donna";
inline constexpr std::string_view kCareer =
    "executive, management, professional, corporation, salary, office, business, career";
inline constexpr std::string_view kFamily =
    "home, parents, children, family, cousins, marriage, wedding, relatives";

inline constexpr std::string_view kMath =
    "math, algebra, geometry, calculus, equations, computation, numbers, addition";
inline constexpr std::string_view kArtsMath =
    "poetry, art, dance, literature, novel, symphony, drama, sculpture";
inline constexpr std::string_view kMaleTerms = "male, man, boy, brother, he, him, his, son";
inline constexpr std::string_view kFemaleTerms =
    "female, woman, girl, sister, she, her, hers, daughter";

inline constexpr std::string_view kScience =
    "science, technology, physics, chemistry, Einstein, NASA, experiment, astronomy";
inline constexpr std::string_view kArtsScience =
    "poetry, art, Shakespeare, dance, literature, novel, symphony, drama";
inline constexpr std::string_view kMaleKin = "brother, father, uncle, grandfather, son, he, his, him";
inline constexpr std::string_view kFemaleKin =
    "sister, mother, aunt, grandmother, daughter, she, hers, her";

inline constexpr std::string_view kOccupations =
    "technician, accountant, supervisor, engineer, worker, educator, clerk, counselor, "
    "inspector, mechanic, manager, therapist, administrator, salesperson, receptionist, "
    "librarian, advisor, pharmacist, janitor, psychologist, physician, carpenter, nurse, "
    "investigator, bartender, specialist, electrician, officer, pathologist, teacher, lawyer, "
    "planner, practitioner, plumber, instructor, surgeon, veterinarian, paramedic, examiner, "
    "chemist, machinist, appraiser, nutritionist, architect, hairdresser, baker, programmer, "
    "paralegal, hygienist, scientist";
inline constexpr std::string_view kAndrogynousNames =
    "Kelly, Tracy, Jamie, Jackie, Jesse, Courtney, Lynn, Taylor, Leslie, Shannon, Stacey, "
    "Jessie, Shawn, Stacy, Casey, Bobby, Terry, Lee, Ashley, Eddie, Chris, Jody, Pat, Carey, "
    "Willie, Morgan, Robbie, Joan, Alexis, Kris, Frankie, Bobbie, Dale, Robin, Billie, Adrian, "
    "Kim, Jaime, Jean, Francis, Marion, Dana, Rene, Johnnie, Jordan, Carmen, Ollie, Dominique, "
    "Jimmie, Shelby";

inline constexpr std::string_view kGreenwald = "Greenwald, McGhee & Schwartz (1998)";
inline constexpr std::string_view kBertrand = "Bertrand & Mullainathan (2004)";
inline constexpr std::string_view kNosekHarvesting = "Nosek, Banaji & Greenwald (2002a)";
inline constexpr std::string_view kNosekMath = "Nosek, Banaji & Greenwald (2002b)";

}  // namespace stimuli_data

inline const std::vector<std::string_view>& builtin_weat_ids() {
  static const std::vector<std::string_view> ids = {
      "flowers_insects", "instruments_weapons", "race_names_valence", "bertrand_greenwald",
      "bertrand_nosek",  "career_family",       "math_arts",          "science_arts"};
  return ids;
}

inline const std::vector<std::string_view>& builtin_wefat_ids() {
  static const std::vector<std::string_view> ids = {"occupations", "androgynous_names"};
  return ids;
}

namespace detail {

inline std::string unknown_id_message(std::string_view id, const std::vector<std::string_view>& valid) {
  std::string msg = "unknown test id '" + std::string(id) + "'; valid ids:";
  for (auto v : valid) msg += " " + std::string(v);
  return msg;
}

inline WordSet african_names_with_alias() {
  WordSet s = make_set("African American names", stimuli_data::kAfricanNames);
  s.aliases["Tvree"] = {"Tyree"};
  return s;
}

}  // namespace detail

inline WeatSpec builtin_weat(std::string_view id) {
  using namespace stimuli_data;
  using detail::make_set;
  if (id == "flowers_insects") {
    return {std::string(id), make_set("Flowers", kFlowers), make_set("Insects", kInsects),
            make_set("Pleasant", kPleasant), make_set("Unpleasant", kUnpleasant),
            std::string(kGreenwald)};
  }
  if (id == "instruments_weapons") {
    return {std::string(id), make_set("Musical instruments", kInstruments),
            make_set("Weapons", kWeapons), make_set("Pleasant", kPleasant),
            make_set("Unpleasant", kUnpleasant), std::string(kGreenwald)};
  }
  if (id == "race_names_valence") {
    return {std::string(id), make_set("European American names", kEuropeanNames),
            detail::african_names_with_alias(), make_set("Pleasant", kPleasant),
            make_set("Unpleasant", kUnpleasantNames), std::string(kGreenwald)};
  }
  if (id == "bertrand_greenwald") {
    return {std::string(id), make_set("European American names", kBertrandEuropean),
            make_set("African American names", kBertrandAfrican), make_set("Pleasant", kPleasant),
            make_set("Unpleasant", kUnpleasantNames),
            std::string(kBertrand) + "; attributes " + std::string(kGreenwald)};
  }
  if (id == "bertrand_nosek") {
    return {std::string(id), make_set("European American names", kBertrandEuropean),
            make_set("African American names", kBertrandAfrican),
            make_set("Pleasantness", kNosekPleasant), make_set("Unpleasantness", kNosekUnpleasant),
            std::string(kBertrand) + "; attributes " + std::string(kNosekHarvesting)};
  }
  if (id == "career_family") {
    return {std::string(id), make_set("Male names", kMaleNames), make_set("Female names", kFemaleNames),
            make_set("Career", kCareer), make_set("Family", kFamily), std::string(kNosekHarvesting)};
  }
  if (id == "math_arts") {
    return {std::string(id), make_set("Math", kMath), make_set("Arts", kArtsMath),
            make_set("Male terms", kMaleTerms), make_set("Female terms", kFemaleTerms),
            std::string(kNosekHarvesting)};
  }
  if (id == "science_arts") {
    return {std::string(id), make_set("Science", kScience), make_set("Arts", kArtsScience),
            make_set("Male terms", kMaleKin), make_set("Female terms", kFemaleKin),
            std::string(kNosekMath)};
  }
  throw UsageError(detail::unknown_id_message(id, builtin_weat_ids()));
}

// Scores are oriented so that positive = associated with the female octet.
inline WefatSpec builtin_wefat(std::string_view id) {
  using namespace stimuli_data;
  using detail::make_set;
  if (id == "occupations") {
    return {std::string(id), make_set("Occupations", kOccupations),
            make_set("Female attributes", kFemaleTerms), make_set("Male attributes", kMaleTerms),
            "US Bureau of Labor Statistics (2015); attributes " + std::string(kNosekHarvesting)};
  }
  if (id == "androgynous_names") {
    return {std::string(id), make_set("Androgynous names", kAndrogynousNames),
            make_set("Female attributes", kFemaleTerms), make_set("Male attributes", kMaleTerms),
            "US Census (1990); attributes " + std::string(kNosekHarvesting)};
  }
  throw UsageError(detail::unknown_id_message(id, builtin_wefat_ids()));
}

inline bool is_builtin_weat(std::string_view id) {
  const auto& ids = builtin_weat_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

inline bool is_builtin_wefat(std::string_view id) {
  const auto& ids = builtin_wefat_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// The race-valence name lists before low-frequency names were removed, and
// the names that were removed from each.
struct OriginalNameLists {
  WordSet european, african;
  std::vector<std::string> deleted_european, deleted_african;
};

inline OriginalNameLists race_names_before_deletion() {
  using namespace stimuli_data;
  return {detail::make_set("European American names", kEuropeanNamesFull),
          detail::make_set("African American names", kAfricanNamesFull),
          detail::split_words(kDeletedEuropeanNames), detail::split_words(kDeletedAfricanNames)};
}

// ---------------------------------------------------------------------------
// JSON specs

inline nlohmann::json to_json(const WordSet& s) {
  nlohmann::json j = {{"label", s.label}, {"words", s.words}};
  if (!s.aliases.empty()) j["aliases"] = s.aliases;
  return j;
}

inline nlohmann::json to_json(const WeatSpec& spec) {
  nlohmann::json j = {{"test_id", spec.test_id}, {"X", to_json(spec.X)}, {"Y", to_json(spec.Y)},
                      {"A", to_json(spec.A)},     {"B", to_json(spec.B)}};
  if (!spec.source.empty()) j["source"] = spec.source;
  return j;
}

inline nlohmann::json to_json(const WefatSpec& spec) {
  nlohmann::json j = {{"test_id", spec.test_id}, {"targets", to_json(spec.targets)},
                      {"A", to_json(spec.A)}, {"B", to_json(spec.B)}};
  if (!spec.source.empty()) j["source"] = spec.source;
  return j;
}

namespace detail {

inline WordSet word_set_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field)) throw ParseError("spec schema: missing field '" + field + "'");
  const auto& o = j.at(field);
  if (!o.is_object()) throw ParseError("spec schema: '" + field + "' must be an object");
  if (!o.contains("label") || !o.at("label").is_string()) {
    throw ParseError("spec schema: '" + field + ".label' must be a string");
  }
  if (!o.contains("words") || !o.at("words").is_array()) {
    throw ParseError("spec schema: '" + field + ".words' must be an array");
  }
  WordSet s;
  s.label = o.at("label").get<std::string>();
  for (const auto& w : o.at("words")) {
    if (!w.is_string()) throw ParseError("spec schema: '" + field + ".words' must hold strings");
    s.words.push_back(w.get<std::string>());
  }
  if (o.contains("aliases")) {
    const auto& a = o.at("aliases");
    if (!a.is_object()) throw ParseError("spec schema: '" + field + ".aliases' must be an object");
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!it.value().is_array()) throw ParseError("spec schema: alias lists must be arrays");
      for (const auto& alt : it.value()) {
        if (!alt.is_string()) throw ParseError("spec schema: aliases must be strings");
        s.aliases[it.key()].push_back(alt.get<std::string>());
      }
    }
  }
  return s;
}

}  // namespace detail

// Schema failures raise ParseError; invariant failures (duplicates,
// overlapping sets) raise UsageError naming the offending words.
inline WeatSpec weat_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("spec schema: document must be a JSON object");
  if (!j.contains("test_id") || !j.at("test_id").is_string()) {
    throw ParseError("spec schema: missing string field 'test_id'");
  }
  WeatSpec spec;
  spec.test_id = j.at("test_id").get<std::string>();
  spec.X = detail::word_set_from_json(j, "X");
  spec.Y = detail::word_set_from_json(j, "Y");
  spec.A = detail::word_set_from_json(j, "A");
  spec.B = detail::word_set_from_json(j, "B");
  if (j.contains("source") && j.at("source").is_string()) spec.source = j.at("source").get<std::string>();
  validate(spec);
  return spec;
}

inline WeatSpec load_spec(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("spec is not valid JSON: ") + e.what());
  }
  return weat_spec_from_json(j);
}

inline WeatSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file '" + path + "'");
  return load_spec(in);
}

// ---------------------------------------------------------------------------
// Resolution

struct ResolvePolicy {
  FallbackChain fallback_chain{Fallback::exact};
  std::uint64_t seed = 0;
};

struct ResolvedWord {
  std::string word;   // as requested in the spec
  std::string token;  // as found in the store
  std::size_t index = 0;
};

struct ResolvedSet {
  std::string label;
  std::vector<ResolvedWord> words;

  std::size_t size() const { return words.size(); }
};

struct MissingWord {
  std::string set;
  std::string word;
  std::vector<std::string> tried;
};

struct Deletion {
  std::string set;
  std::string word;
};

// A word that resolved to a store token other than itself, through a case
// fallback or an alias.
struct Substitution {
  std::string set;
  std::string word;
  std::string token;
  std::string via;  // "lowercase", "capitalized", or "alias"
  std::vector<std::string> tried;
};

struct ResolvedSpec {
  std::string test_id;
  std::string source;
  ResolvedSet X, Y, A, B;
  std::vector<MissingWord> missing;
  std::vector<Deletion> rebalance_deletions;
  std::vector<Substitution> substitutions;
  std::uint64_t seed_used = 0;
  FallbackChain fallback_chain;
};

namespace detail {

template <class T>
ResolvedSet resolve_set(const WordSet& set, const BasicEmbeddingStore<T>& store, const FallbackChain& chain,
                        std::vector<MissingWord>& missing, std::vector<Substitution>& subs) {
  ResolvedSet out{set.label, {}};
  for (const auto& word : set.words) {
    LookupResult r = lookup(store, word, chain);
    std::vector<std::string> tried = r.tried;
    std::string via;
    if (r.hit()) {
      if (r.matched_by != Fallback::exact) via = std::string(to_string(*r.matched_by));
    } else if (auto it = set.aliases.find(word); it != set.aliases.end()) {
      for (const auto& alt : it->second) {
        LookupResult ra = lookup(store, alt, chain);
        tried.insert(tried.end(), ra.tried.begin(), ra.tried.end());
        if (ra.hit()) {
          r = std::move(ra);
          via = "alias";
          break;
        }
      }
    }
    if (!r.hit()) {
      missing.push_back({set.label, word, std::move(tried)});
      continue;
    }
    if (!via.empty()) subs.push_back({set.label, word, r.matched_token, via, tried});
    out.words.push_back({word, r.matched_token, *r.index});
  }
  return out;
}

inline void require_min_size(const ResolvedSet& s, std::size_t min_size) {
  if (s.size() < min_size) {
    throw ResolutionError("set '" + s.label + "' resolved to " + std::to_string(s.size()) +
                          " word(s); at least " + std::to_string(min_size) + " required");
  }
}

}  // namespace detail

// Resolves a single set against the store, dropping and recording misses.
template <class T>
ResolvedSet resolve_word_set(const WordSet& set, const BasicEmbeddingStore<T>& store,
                             const FallbackChain& chain, std::vector<MissingWord>& missing,
                             std::vector<Substitution>& substitutions, std::size_t min_size = 2) {
  ResolvedSet r = detail::resolve_set(set, store, chain, missing, substitutions);
  detail::require_min_size(r, min_size);
  return r;
}

// Drops words missing from the store, then deletes seeded-uniformly-random
// words from the larger target set until |X| = |Y|. Attribute sets are never
// rebalanced.
template <class T>
ResolvedSpec resolve(const WeatSpec& spec, const BasicEmbeddingStore<T>& store, const ResolvePolicy& policy = {}) {
  validate(spec);
  ResolvedSpec out;
  out.test_id = spec.test_id;
  out.source = spec.source;
  out.seed_used = policy.seed;
  out.fallback_chain = policy.fallback_chain;
  const auto& chain = policy.fallback_chain;
  out.X = detail::resolve_set(spec.X, store, chain, out.missing, out.substitutions);
  out.Y = detail::resolve_set(spec.Y, store, chain, out.missing, out.substitutions);
  out.A = detail::resolve_set(spec.A, store, chain, out.missing, out.substitutions);
  out.B = detail::resolve_set(spec.B, store, chain, out.missing, out.substitutions);

  if (out.X.size() != out.Y.size()) {
    ResolvedSet& larger = out.X.size() > out.Y.size() ? out.X : out.Y;
    const std::size_t target = std::min(out.X.size(), out.Y.size());
    std::mt19937_64 rng(policy.seed);
    while (larger.size() > target) {
      std::uniform_int_distribution<std::size_t> pick(0, larger.size() - 1);
      const auto pos = larger.words.begin() + static_cast<std::ptrdiff_t>(pick(rng));
      out.rebalance_deletions.push_back({larger.label, pos->word});
      larger.words.erase(pos);
    }
  }
  for (const ResolvedSet* s : {&out.X, &out.Y, &out.A, &out.B}) detail::require_min_size(*s, 2);
  return out;
}

}  // namespace embias
