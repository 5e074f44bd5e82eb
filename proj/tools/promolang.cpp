#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "promo/corpus.hpp"
#include "promo/experiment.hpp"
#include "promo/inference.hpp"
#include "promo/lexicon.hpp"
#include "promo/metrics.hpp"
#include "promo/novelty.hpp"
#include "promo/report.hpp"
#include "promo/validation.hpp"

namespace fs = std::filesystem;
using namespace promo;

namespace {

struct CommonOpts {
  std::string corpus, lexicon, synonyms, ratings, background, spec, scorer, features;
  std::string levels = "25,50,75,100";
  std::size_t trials = 100;
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string format = "csv";
  bool chart = false;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--corpus", o.corpus, "corpus file (JSON lines)");
  app->add_option("--lexicon", o.lexicon, "promotional lexicon override file");
  app->add_option("--synonyms", o.synonyms, "synonym table file");
  app->add_option("--ratings", o.ratings, "word rating CSV");
  app->add_option("--background", o.background, "background corpus for the null model");
  app->add_option("--spec", o.spec, "model spec file (key=value lines)");
  app->add_option("--features", o.features, "feature table CSV (from analyze)");
  app->add_option("--scorer", o.scorer, "external scorer command");
  app->add_option("--levels", o.levels, "substitution levels, percent");
  app->add_option("--trials", o.trials, "trials per document");
  app->add_option("--runs", o.runs, "randomizations / sweep runs");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--format", o.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--chart", o.chart, "also emit a self-contained chart page");
  app->set_config("--config", "", "key=value configuration file; flags override");
}

Lexicon resolve_lexicon(const CommonOpts& o) {
  if (o.lexicon.empty()) return load_promotional_lexicon();
  return load_promotional_lexicon_file(o.lexicon, &std::cerr);
}

std::vector<std::string> existing_inputs(std::initializer_list<std::string> paths) {
  std::vector<std::string> out;
  for (const std::string& p : paths)
    if (!p.empty()) out.push_back(p);
  return out;
}

void emit(const CommonOpts& o, const std::string& name, const std::string& content) {
  fs::create_directories(o.out);
  write_file_atomic((fs::path(o.out) / name).string(), content);
}

void emit_manifest(const CommonOpts& o, const std::string& command,
                   const std::vector<std::string>& inputs) {
  std::ostringstream cfg;
  cfg << command << '|' << o.corpus << '|' << o.lexicon << '|' << o.synonyms << '|'
      << o.ratings << '|' << o.background << '|' << o.spec << '|' << o.features << '|'
      << o.scorer << '|' << o.levels << '|' << o.trials << '|' << o.runs << '|' << o.seed
      << '|' << o.format;
  RunManifest m = make_manifest(command, cfg.str(), o.seed, inputs);
  emit(o, "manifest.json", m.to_json());
}

std::vector<double> parse_levels(const std::string& levels) {
  std::vector<double> out;
  std::stringstream ss(levels);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double pct = std::stod(item);
    out.push_back(pct / 100.0);
  }
  if (out.empty()) throw std::runtime_error("no substitution levels given");
  return out;
}

// --- subcommands -----------------------------------------------------------

int cmd_synth(CommonOpts& o, std::size_t n, double beta, double base_rate,
              std::size_t doc_length) {
  SyntheticConfig cfg;
  cfg.size = n;
  cfg.beta_promo = beta;
  cfg.base_rate = base_rate;
  cfg.doc_length = doc_length;
  auto docs = generate_synthetic_corpus(cfg, o.seed);
  std::ostringstream out;
  write_corpus(out, docs);
  emit(o, "corpus.jsonl", out.str());
  emit_manifest(o, "synth", {});
  std::cout << "wrote " << docs.size() << " documents to " << o.out << "/corpus.jsonl\n";
  return 0;
}

int cmd_analyze(CommonOpts& o) {
  if (o.corpus.empty()) throw CLI::ValidationError("--corpus is required");
  auto docs = load_corpus_file(o.corpus);
  Lexicon lex = resolve_lexicon(o);
  RatingLexicon ratings;
  const bool have_ratings = !o.ratings.empty();
  if (have_ratings) ratings = load_rating_lexicon_file(o.ratings, &std::cerr);

  std::ostringstream out;
  out.precision(12);
  out << "doc_id,promo_fraction,promo_fraction_unique,head_density,tail_density,"
         "sentence_incidence,word_count,readability,concreteness,reference_count,"
         "funded,year,program,grant_type,applied_amount\n";
  for (const Document& d : docs) {
    FeatureVector f = compute_features(d, lex, have_ratings ? &ratings : nullptr);
    out << f.doc_id << ',' << f.promo_fraction << ',' << f.promo_fraction_unique << ','
        << f.head_density << ',' << f.tail_density << ',' << f.sentence_incidence << ','
        << f.word_count << ',' << f.readability << ',';
    if (f.concreteness) out << *f.concreteness;
    out << ',';
    if (f.reference_count) out << *f.reference_count;
    out << ',';
    if (d.funded) out << (*d.funded ? 1 : 0);
    out << ',' << d.year << ',' << d.program << ',' << d.grant_type << ',';
    if (d.applied_amount) out << *d.applied_amount;
    out << '\n';
  }
  emit(o, "features.csv", out.str());
  emit_manifest(o, "analyze", existing_inputs({o.corpus, o.lexicon, o.ratings}));
  std::cout << "wrote feature table for " << docs.size() << " documents\n";
  return 0;
}

int cmd_validate_lexicon(CommonOpts& o) {
  if (o.corpus.empty()) throw CLI::ValidationError("--corpus is required");
  auto docs = load_corpus_file(o.corpus);
  Lexicon lex = resolve_lexicon(o);

  // item matrix: per-document percentage frequency of each term
  std::vector<std::string> terms(lex.terms.begin(), lex.terms.end());
  std::sort(terms.begin(), terms.end());
  ItemMatrix m;
  m.rows = docs.size();
  m.cols = terms.size();
  m.item_names = terms;
  m.cells.assign(m.rows * m.cols, 0.0);
  std::map<std::string, std::size_t> term_index;
  for (std::size_t c = 0; c < terms.size(); ++c) term_index[terms[c]] = c;
  for (std::size_t r = 0; r < docs.size(); ++r) {
    if (docs[r].tokens.empty()) continue;
    for (const Occurrence& occ : match_promotional(docs[r], lex))
      m.at(r, term_index[occ.term]) += 100.0 / static_cast<double>(docs[r].tokens.size());
  }

  std::ostringstream out;
  out.precision(10);
  out << "# cronbach_alpha," << cronbach_alpha(m) << '\n';
  out << "term,r,p,flag\n";
  std::size_t significant = 0, defined = 0;
  for (const ItemTotal& it : item_total_correlations(m)) {
    out << it.item << ',';
    if (it.r) out << *it.r;
    out << ',';
    if (it.p_value) {
      out << *it.p_value;
      ++defined;
      if (*it.p_value < 0.01) ++significant;
    }
    out << ',' << it.flag << '\n';
  }
  out << "# fraction_items_significant_at_0.01,"
      << (defined ? static_cast<double>(significant) / static_cast<double>(defined) : 0.0)
      << '\n';

  // optional MTMM block: promo ratings vs mean synonym ratings
  if (!o.ratings.empty() && !o.synonyms.empty()) {
    RatingLexicon ratings = load_rating_lexicon_file(o.ratings, &std::cerr);
    SynonymTable syn = load_synonym_table_file(o.synonyms, lex);
    std::vector<double> promo_val, syn_val, promo_ar, syn_ar;
    for (const auto& [term, syns] : syn.entries) {
      const Rating* rp = ratings.find(term);
      if (!rp) continue;
      double sv = 0, sa = 0;
      std::size_t n = 0;
      for (const std::string& s : syns) {
        const Rating* rs = ratings.find(s);
        if (!rs) continue;
        sv += rs->valence;
        sa += rs->arousal;
        ++n;
      }
      if (n == 0) continue;
      promo_val.push_back(rp->valence);
      syn_val.push_back(sv / static_cast<double>(n));
      promo_ar.push_back(rp->arousal);
      syn_ar.push_back(sa / static_cast<double>(n));
    }
    if (promo_val.size() >= 6) {
      MtmmResult v = mtmm_compare(promo_val, syn_val);
      MtmmResult a = mtmm_compare(promo_ar, syn_ar);
      out << "# mtmm_valence_welch_t," << v.welch_t.statistic << ','
          << (v.welch_t.p_value ? *v.welch_t.p_value : -1) << ",\"" << v.welch_t.note
          << "\"\n";
      out << "# mtmm_valence_signed_rank," << v.signed_rank.statistic << ','
          << (v.signed_rank.p_value ? *v.signed_rank.p_value : -1) << ",\""
          << v.signed_rank.note << "\"\n";
      out << "# mtmm_arousal_welch_t," << a.welch_t.statistic << ','
          << (a.welch_t.p_value ? *a.welch_t.p_value : -1) << ",\"" << a.welch_t.note
          << "\"\n";
      out << "# mtmm_arousal_signed_rank," << a.signed_rank.statistic << ','
          << (a.signed_rank.p_value ? *a.signed_rank.p_value : -1) << ",\""
          << a.signed_rank.note << "\"\n";
    } else {
      out << "# mtmm,skipped: fewer than 6 rated promo/synonym pairs\n";
    }
  }

  emit(o, "validation.csv", out.str());
  emit_manifest(o, "validate-lexicon",
                existing_inputs({o.corpus, o.lexicon, o.ratings, o.synonyms}));
  std::cout << "wrote validation report\n";
  return 0;
}

int cmd_novelty(CommonOpts& o) {
  if (o.background.empty() || o.corpus.empty())
    throw CLI::ValidationError("--background and --corpus are required");
  auto background = load_corpus_file(o.background);
  auto grants = load_corpus_file(o.corpus);
  auto links = links_from_documents(background);
  CoCitationStats stats = null_model_zscores(links, o.runs, o.seed);

  std::ostringstream pairs;
  pairs.precision(10);
  pairs << "# background_hash," << file_digest(o.background) << ",R," << o.runs << ",seed,"
        << o.seed << ",self_pairs," << (stats.include_self_pairs ? 1 : 0) << '\n';
  pairs << "journal_a,journal_b,observed,null_mean,null_sd,z\n";
  for (const auto& [pair, mean] : stats.null_mean) {
    long obs = 0;
    if (auto it = stats.observed.find(pair); it != stats.observed.end()) obs = it->second;
    pairs << pair.first << ',' << pair.second << ',' << obs << ',' << mean << ','
          << stats.null_sd.at(pair) << ',';
    if (auto it = stats.zscores.find(pair); it != stats.zscores.end()) pairs << it->second;
    else pairs << "undefined";
    pairs << '\n';
  }
  emit(o, "cocitation_stats.csv", pairs.str());

  std::ostringstream out;
  out.precision(10);
  out << "doc_id,score,n_pairs,n_negative,no_negative_pairs,sparse_pairs,low_confidence,"
         "dropped_references,error\n";
  for (const Document& g : grants) {
    out << g.id << ',';
    try {
      InnovativenessResult r = grant_innovativeness(g, stats);
      out << r.score << ',' << r.zscores.size() << ',' << r.n_negative << ','
          << r.no_negative_pairs << ',' << r.sparse_pairs << ',' << r.low_confidence << ','
          << r.dropped_references << ",\n";
    } catch (const std::exception& e) {
      out << ",,,,,,,\"" << e.what() << "\"\n";
    }
  }
  emit(o, "innovativeness.csv", out.str());
  emit_manifest(o, "novelty", existing_inputs({o.background, o.corpus}));
  std::cout << "scored " << grants.size() << " grants against "
            << stats.null_mean.size() << " journal pairs\n";
  return 0;
}

ModelSpec load_model_spec(const std::string& path, std::vector<double>* grid,
                          std::string* focal) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open model spec: " + path);
  ModelSpec spec;
  std::string line;
  auto split_list = [](const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  };
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "outcome") spec.outcome = value;
    else if (key == "predictors") spec.predictors = split_list(value);
    else if (key == "fe") spec.categorical_fe = split_list(value);
    else if (key == "family") {
      if (value == "logit") spec.family = Family::logit;
      else if (value == "ols") spec.family = Family::ols;
      else if (value == "negbin") spec.family = Family::negbin;
      else throw std::runtime_error("unknown family: " + value);
    } else if (key == "margins_focal" && focal) {
      *focal = value;
    } else if (key == "grid" && grid) {
      for (const std::string& g : split_list(value)) grid->push_back(std::stod(g));
    }
  }
  if (spec.outcome.empty()) throw std::runtime_error("model spec is missing outcome=");
  return spec;
}

int cmd_regress(CommonOpts& o) {
  if (o.features.empty() || o.spec.empty())
    throw CLI::ValidationError("--features and --spec are required");
  std::vector<double> grid;
  std::string focal;
  ModelSpec spec = load_model_spec(o.spec, &grid, &focal);

  std::ifstream f(o.features);
  if (!f) throw std::runtime_error("cannot open feature table: " + o.features);
  // feature tables carry string id/group columns; load them as categorical
  std::vector<std::string> categorical = spec.categorical_fe;
  for (const char* s : {"doc_id", "program", "grant_type"})
    if (std::find(categorical.begin(), categorical.end(), s) == categorical.end())
      categorical.emplace_back(s);
  Dataset data = load_dataset_csv(f, categorical);
  Design design = build_design(data, spec);

  RegressionFit fit;
  switch (spec.family) {
    case Family::logit: fit = fit_logit(design.X, design.y, design.names); break;
    case Family::ols: fit = fit_ols(design.X, design.y, design.names); break;
    case Family::negbin: fit = fit_negbin(design.X, design.y, design.names); break;
  }

  std::ostringstream out;
  out.precision(10);
  const char* family_name =
      spec.family == Family::logit ? "logit" : spec.family == Family::ols ? "ols" : "negbin";
  out << "# family," << family_name << ",n," << fit.n << ",k," << fit.k << ",loglik,"
      << fit.loglik << ",bic," << bic(fit) << ",converged," << fit.converged
      << ",iterations," << fit.iterations;
  if (fit.dispersion) out << ",dispersion," << *fit.dispersion
                          << ",poisson_limit," << fit.poisson_limit;
  out << '\n';
  out << "term,coefficient,std_error,p_value\n";
  for (std::size_t j = 0; j < fit.names.size(); ++j)
    out << fit.names[j] << ',' << fit.coefficients(static_cast<Eigen::Index>(j)) << ','
        << fit.std_errors[j] << ',' << fit.p_values[j] << '\n';
  {
    std::vector<double> v = vif(design.X, design.names);
    out << "# vif";
    for (std::size_t j = 0; j < v.size(); ++j)
      out << ',' << design.names[j + 1] << ',' << v[j];
    out << '\n';
  }
  emit(o, "fit.csv", out.str());

  if (!focal.empty()) {
    std::size_t fc = 0;
    bool found = false;
    for (std::size_t j = 0; j < design.names.size(); ++j)
      if (design.names[j] == focal) {
        fc = j;
        found = true;
      }
    if (!found) throw std::runtime_error("margins_focal column not in design: " + focal);
    if (grid.empty()) {
      const double lo = design.X.col(static_cast<Eigen::Index>(fc)).minCoeff();
      const double hi = design.X.col(static_cast<Eigen::Index>(fc)).maxCoeff();
      for (int i = 0; i <= 20; ++i) grid.push_back(lo + (hi - lo) * i / 20.0);
    }
    MarginsCurve curve = margins(fit, design.X, fc, grid);
    std::ostringstream mout;
    mout.precision(10);
    mout << "# margins_flavor," << curve.flavor << ",focal," << focal << '\n';
    mout << "grid,predicted,ci_low,ci_high,outside_support\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
      mout << curve.grid[i] << ',' << curve.predicted[i] << ',' << curve.ci_low[i] << ','
           << curve.ci_high[i] << ',' << (curve.outside_support[i] ? 1 : 0) << '\n';
    emit(o, "margins.csv", mout.str());
    if (o.chart) {
      ChartSeries pred{"predicted", curve.grid, curve.predicted};
      ChartSeries lo{"ci_low", curve.grid, curve.ci_low};
      ChartSeries hi{"ci_high", curve.grid, curve.ci_high};
      emit(o, "margins.html",
           render_chart_html("Margins of " + focal, focal, "prediction", {pred, lo, hi}));
    }
  }
  emit_manifest(o, "regress", existing_inputs({o.features, o.spec}));
  std::cout << "fit " << family_name << " model with " << fit.k << " parameters\n";
  return 0;
}

int cmd_experiment(CommonOpts& o) {
  if (o.corpus.empty() || o.synonyms.empty())
    throw CLI::ValidationError("--corpus and --synonyms are required");
  if (o.scorer.empty() && o.ratings.empty())
    throw CLI::ValidationError("provide --scorer CMD or --ratings for the baseline scorer");
  auto docs = load_corpus_file(o.corpus);
  Lexicon lex = resolve_lexicon(o);
  SynonymTable syn = load_synonym_table_file(o.synonyms, lex);
  std::unique_ptr<Scorer> scorer;
  if (!o.scorer.empty()) {
    scorer = make_external_scorer(o.scorer);
  } else {
    scorer = make_baseline_valence_scorer(load_rating_lexicon_file(o.ratings, &std::cerr));
  }

  std::vector<double> levels = parse_levels(o.levels);
  std::ostringstream table, per_doc;
  table.precision(10);
  per_doc.precision(10);
  table << "# trials," << o.trials << ",alpha,0.05,sidedness,one-sided,scorer,"
        << scorer->describe() << '\n';
  table << "level_percent,n_applicable,drop_fraction\n";
  per_doc << "doc_id,level_percent,trials,k,p_value,significant_drop,n_promo_sentences,"
             "applicable\n";
  std::vector<double> level_pct, fractions;
  for (double level : levels) {
    auto outcomes =
        run_experiment_corpus(docs, lex, syn, *scorer, level, o.trials, o.seed);
    std::size_t applicable = 0;
    for (const ExperimentOutcome& e : outcomes) {
      if (e.applicable) ++applicable;
      per_doc << e.doc_id << ',' << level * 100.0 << ',' << e.trials << ',' << e.k << ','
              << e.p_value << ',' << e.significant_drop << ',' << e.n_promo_sentences
              << ',' << e.applicable << '\n';
    }
    const double fraction = corpus_drop_fraction(outcomes, level);
    table << level * 100.0 << ',' << applicable << ',' << fraction << '\n';
    level_pct.push_back(level * 100.0);
    fractions.push_back(fraction);
  }
  emit(o, "drop_fractions.csv", table.str());
  emit(o, "outcomes.csv", per_doc.str());
  if (o.chart)
    emit(o, "drop_fractions.html",
         render_chart_html("Sentiment drop fraction by substitution level",
                           "substitution level (%)", "fraction with significant drop",
                           {{"drop fraction", level_pct, fractions}}));
  emit_manifest(o, "experiment", existing_inputs({o.corpus, o.synonyms, o.ratings}));
  std::cout << "experiment finished over " << levels.size() << " levels\n";
  return 0;
}

int cmd_robustness(CommonOpts& o, const std::string& kind_name, double frac) {
  if (o.corpus.empty()) throw CLI::ValidationError("--corpus is required");
  auto docs = load_corpus_file(o.corpus);
  Lexicon lex = resolve_lexicon(o);
  PerturbationKind kind;
  if (kind_name == "none") kind = PerturbationKind::none;
  else if (kind_name == "occurrences") kind = PerturbationKind::drop_occurrences;
  else if (kind_name == "lexicon") kind = PerturbationKind::drop_lexicon;
  else throw CLI::ValidationError("unknown perturbation kind: " + kind_name);

  RobustnessSummary summary = robustness_sweep(docs, lex, kind, frac, o.runs, o.seed);
  std::ostringstream out;
  out.precision(10);
  out << "# kind," << kind_name << ",frac," << frac << ",runs," << o.runs
      << ",fraction_significant," << summary.fraction_significant << ",failed_runs,"
      << summary.failed_runs << '\n';
  out << "run,beta_promo,p_value,failed,error\n";
  for (std::size_t r = 0; r < summary.runs.size(); ++r) {
    const RobustnessRun& run = summary.runs[r];
    out << r << ',' << run.beta_promo << ',' << run.p_value << ',' << run.failed << ",\""
        << run.error << "\"\n";
  }
  emit(o, "robustness.csv", out.str());
  emit_manifest(o, "robustness", existing_inputs({o.corpus, o.lexicon}));
  std::cout << "fraction of runs significant at 0.05: " << summary.fraction_significant
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"promolang: promotional-language corpus analysis"};
  app.require_subcommand(1);
  CommonOpts o;

  std::size_t synth_n = 100;
  double synth_beta = 37.7, synth_base = 0.168;
  std::size_t synth_len = 300;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, o);
  synth->add_option("--n", synth_n, "number of documents");
  synth->add_option("--beta", synth_beta, "true logit coefficient (proportion scale)");
  synth->add_option("--base-rate", synth_base, "marginal funding rate");
  synth->add_option("--doc-length", synth_len, "tokens per document");

  auto* analyze = app.add_subcommand("analyze", "corpus -> feature table");
  add_common(analyze, o);
  auto* validate = app.add_subcommand("validate-lexicon", "psychometric validation report");
  add_common(validate, o);
  auto* novelty = app.add_subcommand("novelty", "co-citation innovativeness scores");
  add_common(novelty, o);
  auto* regress = app.add_subcommand("regress", "fit a model spec, optional margins");
  add_common(regress, o);
  auto* experiment = app.add_subcommand("experiment", "synonym-substitution experiment");
  add_common(experiment, o);
  std::string rob_kind = "occurrences";
  double rob_frac = 0.2;
  auto* robustness = app.add_subcommand("robustness", "measurement-error sweep");
  add_common(robustness, o);
  robustness->add_option("--kind", rob_kind, "none|occurrences|lexicon");
  robustness->add_option("--frac", rob_frac, "perturbation fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, synth_n, synth_beta, synth_base, synth_len);
    if (analyze->parsed()) return cmd_analyze(o);
    if (validate->parsed()) return cmd_validate_lexicon(o);
    if (novelty->parsed()) return cmd_novelty(o);
    if (regress->parsed()) return cmd_regress(o);
    if (experiment->parsed()) return cmd_experiment(o);
    if (robustness->parsed()) return cmd_robustness(o, rob_kind, rob_frac);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
