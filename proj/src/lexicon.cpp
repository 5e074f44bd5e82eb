#include "promo/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace promo {

namespace {

// The 139 promotional terms (Millar et al. 2022 dictionary).
const std::vector<std::string> kDefaultTerms = {
    // importance
    "compelling", "critical", "crucial", "essential", "foundational",
    "fundamental", "imperative", "important", "indispensable", "invaluable",
    "key", "major", "paramount", "pivotal", "significant", "strategic",
    "timely", "ultimate", "urgent", "vital",
    // novelty
    "creative", "emerging", "first", "groundbreaking", "innovative", "latest",
    "novel", "revolutionary", "unique", "unparalleled", "unprecedented",
    // rigor
    "accurate", "advanced", "careful", "cohesive", "detailed", "nuanced",
    "powerful", "quality", "reproducible", "rigorous", "robust", "scientific",
    "sophisticated", "strong", "systematic",
    // utility
    "accessible", "actionable", "deployable", "durable", "easy", "effective",
    "efficacious", "efficient", "generalizable", "ideal", "impactful",
    "intuitive", "meaningful", "productive", "ready", "relevant", "rich",
    "safer", "scalable", "seamless", "sustainable", "synergistic", "tailored",
    "tangible", "transformative", "user-friendly",
    // team qualities
    "ambitious", "collegial", "dedicated", "exceptional", "experienced",
    "intellectual", "longstanding", "motivated", "premier", "prestigious",
    "promising", "qualified", "renowned", "senior", "skilled", "stellar",
    "successful", "talented", "vibrant",
    // scale
    "ample", "biggest", "broad", "comprehensive", "considerable", "deeper",
    "diverse", "enormous", "expansive", "extensive", "fastest", "greatest",
    "huge", "immediate", "immense", "interdisciplinary", "international",
    "interprofessional", "largest", "massive", "multidisciplinary", "myriad",
    "overwhelming", "substantial", "top", "transdisciplinary", "tremendous",
    "vast",
    // affect
    "attractive", "confident", "exciting", "incredible", "interesting",
    "intriguing", "notable", "outstanding", "remarkable", "surprising",
    // urgency of problem
    "alarming", "daunting", "desperate", "devastating", "dire", "dismal",
    "elusive", "stark", "unanswered", "unmet"};

std::string lower_copy(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

const std::vector<std::string>& default_lexicon_terms() { return kDefaultTerms; }

Lexicon load_promotional_lexicon() {
  Lexicon lex;
  lex.version = "millar-2022-139";
  lex.terms.insert(kDefaultTerms.begin(), kDefaultTerms.end());
  return lex;
}

Lexicon load_promotional_lexicon(std::istream& override_source, std::ostream* warnings) {
  Lexicon lex;
  lex.version = "override";
  std::string line;
  while (std::getline(override_source, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string term = lower_copy(strip(line));
    if (term.empty()) continue;
    if (!lex.terms.insert(term).second && warnings)
      *warnings << "warning: duplicate lexicon term \"" << term << "\" deduplicated\n";
  }
  if (lex.terms.empty()) throw std::runtime_error("lexicon override file is empty");
  return lex;
}

Lexicon load_promotional_lexicon_file(const std::string& path, std::ostream* warnings) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open lexicon file: " + path);
  return load_promotional_lexicon(f, warnings);
}

std::vector<Occurrence> match_promotional(const Document& doc, const Lexicon& lexicon) {
  std::vector<Occurrence> out;
  std::size_t sentence = 0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    while (sentence + 1 < doc.sentences.size() &&
           i >= doc.sentences[sentence].first + doc.sentences[sentence].count)
      ++sentence;
    if (lexicon.contains(doc.tokens[i].lower))
      out.push_back({i, doc.tokens[i].lower, sentence});
  }
  return out;
}

SynonymTable load_synonym_table(std::istream& source, const Lexicon& lexicon) {
  SynonymTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      if (line.rfind("# provenance:", 0) == 0)
        table.provenance = strip(line.substr(13));
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("synonym file line " + std::to_string(line_no) +
                               ": expected term<TAB>synonyms");
    std::string term = lower_copy(strip(line.substr(0, tab)));
    if (!lexicon.contains(term))
      throw std::runtime_error("synonym file line " + std::to_string(line_no) +
                               ": key \"" + term + "\" is not a lexicon term");
    std::vector<std::string> syns;
    std::stringstream rest(line.substr(tab + 1));
    std::string syn;
    while (std::getline(rest, syn, ',')) {
      syn = lower_copy(strip(syn));
      if (syn.empty()) continue;
      if (lexicon.contains(syn))
        throw std::runtime_error("synonym file line " + std::to_string(line_no) +
                                 ": synonym \"" + syn + "\" is itself a lexicon term");
      if (syn.find(' ') != std::string::npos)
        throw std::runtime_error("synonym file line " + std::to_string(line_no) +
                                 ": multi-token synonym \"" + syn + "\" not supported");
      syns.push_back(std::move(syn));
    }
    if (syns.empty())
      throw std::runtime_error("synonym file line " + std::to_string(line_no) +
                               ": empty synonym list for \"" + term + "\"");
    table.entries[term] = std::move(syns);
  }
  return table;
}

SynonymTable load_synonym_table_file(const std::string& path, const Lexicon& lexicon) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open synonym file: " + path);
  return load_synonym_table(f, lexicon);
}

RatingLexicon load_rating_lexicon(std::istream& source, std::ostream* warnings) {
  RatingLexicon lex;
  std::string line;
  if (!std::getline(source, line))
    throw std::runtime_error("rating file is empty");
  // header: word,valence,arousal[,concreteness][,weight]
  std::vector<std::string> header;
  {
    std::stringstream h(line);
    std::string col;
    while (std::getline(h, col, ',')) header.push_back(lower_copy(strip(col)));
  }
  if (header.size() < 3 || header[0] != "word" || header[1] != "valence" ||
      header[2] != "arousal")
    throw std::runtime_error("rating file header must start with word,valence,arousal");

  std::size_t row = 1;
  while (std::getline(source, line)) {
    ++row;
    if (strip(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(strip(cell));
    while (cells.size() < header.size()) cells.emplace_back();
    auto parse = [&](const std::string& s) -> double {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != s.size() || s.empty())
        throw std::runtime_error("rating file row " + std::to_string(row) +
                                 ": non-numeric rating \"" + s + "\"");
      return v;
    };
    Rating r;
    std::string word = lower_copy(cells[0]);
    if (word.empty())
      throw std::runtime_error("rating file row " + std::to_string(row) + ": empty word");
    r.valence = parse(cells[1]);
    r.arousal = parse(cells[2]);
    for (std::size_t c = 3; c < header.size() && c < cells.size(); ++c) {
      if (cells[c].empty()) continue;
      if (header[c] == "concreteness") r.concreteness = parse(cells[c]);
      else if (header[c] == "weight") r.frequency_weight = parse(cells[c]);
    }
    if (lex.ratings.count(word) && warnings)
      *warnings << "warning: duplicate rating row for \"" << word << "\", last wins\n";
    lex.ratings[word] = r;
  }
  if (lex.ratings.empty()) throw std::runtime_error("rating file has no data rows");
  return lex;
}

RatingLexicon load_rating_lexicon_file(const std::string& path, std::ostream* warnings) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open rating file: " + path);
  return load_rating_lexicon(f, warnings);
}

}  // namespace promo
