// embedstab command-line driver.

#include "embedstab/align_average.hpp"
#include "embedstab/corpus.hpp"
#include "embedstab/embedding_space.hpp"
#include "embedstab/error.hpp"
#include "embedstab/experiment.hpp"
#include "embedstab/gaussian_model.hpp"
#include "embedstab/instability.hpp"
#include "embedstab/nn_metrics.hpp"
#include "embedstab/pip_metrics.hpp"
#include "embedstab/report.hpp"
#include "embedstab/run_set.hpp"
#include "embedstab/semantic_change.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace embedstab;

namespace {

std::vector<std::string> read_word_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto end = line.find_first_of(" \t\r", start);
    out.push_back(line.substr(start, end - start));
  }
  return out;
}

void emit(const Report& report, const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  if (out.extension() == ".json")
    write_json(report, out);
  else
    write_tsv(report, out);
}

RunSet load_runs(const fs::path& dir, std::size_t limit, bool normalized) {
  RunSet rs = load_run_set(dir);
  if (limit > 0 && rs.spaces.size() > limit) rs.spaces.resize(limit);
  if (normalized)
    for (auto& s : rs.spaces) s = normalize(s);
  return rs;
}

void add_run_inputs(Report& r, const std::string& label, const fs::path& dir, std::size_t used) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".vec") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (std::size_t i = 0; i < files.size() && i < used; ++i)
    r.add_input(label + "/" + std::to_string(i), files[i]);
}

EmbeddingSpace load_space(const fs::path& path) {
  EmbeddingSpace s = load_text_vectors(path);
  auto freq = path;
  freq.replace_extension(".freq");
  if (fs::exists(freq))
    s = EmbeddingSpace(s.vocab().with_frequencies(load_frequencies(freq)), s.matrix(), false);
  return s;
}

struct TrainerFlags {
  SgnsConfig cfg;
  void attach(CLI::App* app, bool epochs_as_iter) {
    app->add_option("--dim", cfg.dim, "Embedding dimension")->capture_default_str();
    app->add_option("--window", cfg.window, "Maximum context window")->capture_default_str();
    app->add_option("--negatives,--neg", cfg.negatives, "Noise words per positive pair")
        ->capture_default_str();
    app->add_option(epochs_as_iter ? "--iter" : "--epochs", cfg.epochs, "Training epochs")
        ->capture_default_str();
    app->add_option("--lr", cfg.initial_lr, "Initial learning rate")->capture_default_str();
    app->add_option("--subsample,--sample", cfg.subsample_t, "Subsampling threshold t")
        ->capture_default_str();
    app->add_option(epochs_as_iter ? "--train-min-count" : "--min-count", cfg.min_count,
                    "Minimum corpus count for the training vocabulary")
        ->capture_default_str();
    app->add_option("--threads", cfg.threads, "Training threads (>1 is nondeterministic)")
        ->capture_default_str();
  }
};

// --- train -------------------------------------------------------------------

void setup_train(CLI::App& root) {
  auto* app = root.add_subcommand("train", "Train repeated SGNS runs under a sampling mode");
  struct Opts {
    fs::path config_file;
    std::optional<std::string> corpus, sampling, out;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    bool lowercase = false, dedup = false;
    TrainerFlags trainer;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--config", o->config_file, "key = value configuration file; flags override it")
      ->check(CLI::ExistingFile);
  app->add_option("--corpus", o->corpus, "Corpus, one document per line");
  app->add_option("--sampling", o->sampling, "fixed | shuffled | bootstrapped (default shuffled)");
  app->add_option("--runs", o->runs, "Number of runs (default 1)");
  app->add_option("--seed", o->seed, "Global seed; run i uses seed + i (default 1)");
  app->add_option("--out", o->out,
                  "Output directory for run_NNN.vec and manifest.json, or a single .vec file "
                  "when --runs is 1");
  app->add_flag("--lowercase", o->lowercase, "Lowercase tokens");
  app->add_flag("--dedup", o->dedup, "Drop duplicate lines");
  o->trainer.attach(app, false);
  app->callback([o, app] {
    ExperimentConfig c;
    if (!o->config_file.empty())
      for (const auto& [k, v] : read_key_values(o->config_file)) apply_setting(c, k, v);
    // Trainer flags given on the command line override the file.
    const auto given = [&](const char* flag) { return app->count(flag) > 0; };
    if (given("--dim")) c.trainer.dim = o->trainer.cfg.dim;
    if (given("--window")) c.trainer.window = o->trainer.cfg.window;
    if (given("--negatives")) c.trainer.negatives = o->trainer.cfg.negatives;
    if (given("--epochs")) c.trainer.epochs = o->trainer.cfg.epochs;
    if (given("--lr")) c.trainer.initial_lr = o->trainer.cfg.initial_lr;
    if (given("--subsample")) c.trainer.subsample_t = o->trainer.cfg.subsample_t;
    if (given("--min-count")) c.trainer.min_count = o->trainer.cfg.min_count;
    if (given("--threads")) c.trainer.threads = o->trainer.cfg.threads;
    if (o->corpus) c.corpus = *o->corpus;
    if (o->sampling) c.sampling = parse_sampling_kind(*o->sampling);
    if (o->runs) c.runs = *o->runs;
    if (o->seed) c.seed = *o->seed;
    if (o->out) c.out_dir = *o->out;
    if (o->lowercase) c.lowercase = true;
    if (o->dedup) c.dedup = true;
    if (c.out_dir.extension() == ".vec") {
      if (c.runs != 1) throw UsageError("a .vec output file takes exactly one run");
      const fs::path file = c.out_dir;
      c.out_dir = file.parent_path() / (file.stem().string() + ".runs");
      const auto runs = run_experiment(c);
      fs::copy_file(runs[0].vectors, file, fs::copy_options::overwrite_existing);
      auto freq = file;
      freq.replace_extension(".freq");
      fs::copy_file(runs[0].frequencies, freq, fs::copy_options::overwrite_existing);
      std::cout << file.string() << '\t' << runs[0].sha256 << '\n';
      return;
    }
    for (const auto& a : run_experiment(c))
      std::cout << a.vectors.string() << '\t' << a.sha256 << '\n';
  });
}

// --- sample ------------------------------------------------------------------

void setup_sample(CLI::App& root) {
  auto* app = root.add_subcommand("sample", "Write one sampled copy of a corpus");
  struct Opts {
    fs::path corpus, out;
    std::string mode = "shuffled";
    std::uint64_t seed = 1;
    bool lowercase = false, dedup = false;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--corpus", o->corpus, "Input corpus")->required()->check(CLI::ExistingFile);
  app->add_option("--mode", o->mode, "fixed | shuffled | bootstrapped")->capture_default_str();
  app->add_option("--seed", o->seed, "Sampling seed")->capture_default_str();
  app->add_option("--out", o->out, "Output corpus")->required();
  app->add_flag("--lowercase", o->lowercase, "Lowercase tokens");
  app->add_flag("--dedup", o->dedup, "Drop duplicate lines");
  app->callback([o] {
    const Corpus c = load_corpus(o->corpus, o->lowercase, o->dedup);
    save_corpus(sample(c, {parse_sampling_kind(o->mode), o->seed}), o->out);
  });
}

// --- instability -------------------------------------------------------------

void setup_instability(CLI::App& root) {
  auto* app = root.add_subcommand(
      "instability",
      "Intrinsic and extrinsic instability from shuffled and bootstrapped run directories.\n"
      "By default only the first 2 runs of each directory are used: two runs on independently\n"
      "shuffled corpora already give a stable reduced PIP estimate.");
  struct Opts {
    fs::path shuffled, bootstrapped, out, words, words_out;
    std::size_t runs = 2, proxy_size = kDefaultProxySize;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--shuffled", o->shuffled, "Directory of shuffled-corpus runs (*.vec)")
      ->required()
      ->check(CLI::ExistingDirectory);
  app->add_option("--bootstrapped", o->bootstrapped, "Directory of bootstrapped-corpus runs")
      ->check(CLI::ExistingDirectory);
  app->add_option("--runs", o->runs, "Runs used from each directory (0 = all)")
      ->capture_default_str();
  app->add_option("--proxy-size", o->proxy_size, "Size of the proxy vocabulary V'")
      ->capture_default_str();
  app->add_option("--seed", o->seed, "Proxy sampling seed")->capture_default_str();
  app->add_option("--words", o->words, "Word list for word-wise instability");
  app->add_option("--words-out", o->words_out, "Word-wise report (needs --words)");
  app->add_option("--out", o->out, "Report file (.tsv or .json)")->required();
  app->callback([o] {
    const RunSet sh = load_runs(o->shuffled, o->runs, true);
    std::optional<RunSet> bo;
    if (!o->bootstrapped.empty()) bo = load_runs(o->bootstrapped, o->runs, true);
    std::vector<EmbeddingSpace> all = sh.spaces;
    if (bo) all.insert(all.end(), bo->spaces.begin(), bo->spaces.end());
    const ProxySample proxy = draw_proxy(joint_vocabulary(all), o->proxy_size, o->seed);
    const InstabilityReport ir =
        bo ? extrinsic_instability(sh, *bo, proxy) : intrinsic_instability(sh, proxy);

    Report r("instability", {"quantity", "pair", "proxy_size", "seed", "value"});
    r.add_meta("proxy_seed", std::to_string(proxy.seed));
    add_run_inputs(r, "shuffled", o->shuffled, sh.size());
    if (bo) add_run_inputs(r, "bootstrapped", o->bootstrapped, bo->size());
    const auto row = [&](const std::string& q, const std::string& pair, const std::string& v) {
      r.add_row({q, pair, cell(proxy.size()), std::to_string(proxy.seed), v});
    };
    for (const auto& p : ir.shuffled_pairs)
      row("shuffled_rpip", std::to_string(p.i) + "-" + std::to_string(p.j), cell(p.value));
    for (const auto& p : ir.bootstrap_pairs)
      row("bootstrapped_rpip", std::to_string(p.i) + "-" + std::to_string(p.j), cell(p.value));
    row("I_int", "all", cell(ir.intrinsic));
    row("I_int_std", "all", cell(ir.intrinsic_std));
    if (bo) {
      row("boot_mean", "all", cell(ir.bootstrap_mean));
      row("boot_std", "all", cell(ir.bootstrap_std));
      row("I_ext", "all", cell(ir.extrinsic));
      row("I_ext_std", "all", cell(ir.extrinsic_std));
    }
    emit(r, o->out);

    if (!o->words.empty()) {
      if (o->words_out.empty()) throw UsageError("--words needs --words-out");
      const auto words = read_word_list(o->words);
      Report w("instability-words", {"word", "J_int", "J_ext"});
      w.add_meta("proxy_seed", std::to_string(proxy.seed));
      w.add_meta("proxy_size", cell(proxy.size()));
      w.add_input("words", o->words);
      for (const auto& wi : wordwise_instabilities(words, sh, bo ? &*bo : nullptr, proxy))
        w.add_row({wi.word, cell(wi.intrinsic), bo ? cell(wi.extrinsic) : std::string("-")});
      emit(w, o->words_out);
    }
  });
}

// --- overlap -----------------------------------------------------------------

void setup_overlap(CLI::App& root) {
  auto* app = root.add_subcommand("overlap", "Mean p@n and j@n of targets over all run pairs");
  struct Opts {
    fs::path runs, second, targets, out;
    std::size_t n = 10;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--runs", o->runs, "Run directory")->required()->check(CLI::ExistingDirectory);
  app->add_option("--targets", o->targets, "Target word list")->required()->check(CLI::ExistingFile);
  app->add_option("--n", o->n, "Neighbor list length")->capture_default_str();
  app->add_option("--second", o->second, "Independent second run directory (consistency)")
      ->check(CLI::ExistingDirectory);
  app->add_option("--out", o->out, "Report file (.tsv or .json)")->required();
  app->callback([o] {
    const RunSet rs = load_runs(o->runs, 0, false);
    const auto targets = read_word_list(o->targets);
    Report r("overlap", {"target", "n", "mean_p", "mean_j", "pairs"});
    add_run_inputs(r, "runs", o->runs, rs.size());
    r.add_input("targets", o->targets);
    for (const auto& m : mean_overlap(rs, targets, o->n))
      r.add_row({m.target, cell(m.n), cell(m.mean_p), cell(m.mean_j), cell(m.pair_count)});
    if (!o->second.empty()) {
      const RunSet second = load_runs(o->second, 0, false);
      add_run_inputs(r, "second", o->second, second.size());
      const auto c = overlap_consistency(rs, second, targets, o->n);
      r.add_meta("consistency_rho_p", cell(c.rho_p));
      r.add_meta("consistency_rho_j", cell(c.rho_j));
    }
    emit(r, o->out);
  });
}

// --- predict -----------------------------------------------------------------

void setup_predict(CLI::App& root) {
  auto* app = root.add_subcommand(
      "predict", "Gaussian-model prediction of p@1 and p@2 from the runs' pair statistics");
  struct Opts {
    fs::path runs, targets, out, profiles_out;
    double pruning = 1e-5;
    std::optional<double> gamma;
    std::string estimator = "ml";
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--runs", o->runs, "Run directory")->required()->check(CLI::ExistingDirectory);
  app->add_option("--targets", o->targets, "Target word list")->required()->check(CLI::ExistingFile);
  app->add_option("--pruning", o->pruning, "Pruning threshold on P[query beats reference]")
      ->capture_default_str();
  app->add_option("--gamma", o->gamma, "Constant sigma for the structure factor (default: mean)");
  app->add_option("--sigma-estimator", o->estimator, "ml (1/r) or unbiased (1/(r-1))")
      ->capture_default_str()
      ->check(CLI::IsMember({"ml", "unbiased"}));
  app->add_option("--profiles-out", o->profiles_out, "Write the estimated profiles (TSV)");
  app->add_option("--out", o->out, "Report file (.tsv or .json)")->required();
  app->callback([o] {
    const RunSet rs = load_runs(o->runs, 0, false);
    const auto targets = read_word_list(o->targets);
    const SigmaEstimator est =
        o->estimator == "ml" ? SigmaEstimator::maximum_likelihood : SigmaEstimator::unbiased;
    PredictionOptions opt;
    opt.pruning_threshold = o->pruning;
    const auto measured = mean_overlap(rs, targets, 1);
    Report r("predict",
             {"target", "predicted_p1", "predicted_p2", "structure_factor", "measured_p1"});
    add_run_inputs(r, "runs", o->runs, rs.size());
    r.add_input("targets", o->targets);
    r.add_meta("pruning", cell(o->pruning));
    r.add_meta("sigma_estimator", o->estimator);
    std::vector<StabilityProfile> profiles;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      StabilityProfile p = estimate_profile(rs, targets[t], std::nullopt, est);
      r.add_row({targets[t], cell(expected_overlap(p, 1, opt)), cell(expected_overlap(p, 2, opt)),
                 cell(structure_factor(p, 1, o->gamma, opt)), cell(measured[t].mean_p)});
      if (!o->profiles_out.empty()) profiles.push_back(std::move(p));
    }
    emit(r, o->out);
    if (!o->profiles_out.empty()) save_profiles(profiles, o->profiles_out);
  });
}

// --- pip ---------------------------------------------------------------------

void setup_pip(CLI::App& root) {
  auto* app = root.add_subcommand("pip", "PIP, reduced PIP and word-wise PIP loss of two spaces");
  struct Opts {
    fs::path a, b, out, words, words_out;
    std::size_t proxy_size = kDefaultProxySize;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--a", o->a, "First space")->required()->check(CLI::ExistingFile);
  app->add_option("--b", o->b, "Second space")->required()->check(CLI::ExistingFile);
  app->add_option("--proxy-size", o->proxy_size, "Size of the proxy vocabulary V'")
      ->capture_default_str();
  app->add_option("--seed", o->seed, "Proxy sampling seed")->capture_default_str();
  app->add_option("--words", o->words, "Word list for word-wise losses");
  app->add_option("--words-out", o->words_out, "Word-wise report (needs --words)");
  app->add_option("--out", o->out, "Report file (.tsv or .json)")->required();
  app->callback([o] {
    const EmbeddingSpace a = normalize(load_text_vectors(o->a));
    const EmbeddingSpace b = normalize(load_text_vectors(o->b));
    const ProxySample proxy = draw_proxy(joint_vocabulary(a, b), o->proxy_size, o->seed);
    const double d = pip_loss(a, b, proxy);
    Report r("pip", {"pair", "proxy_size", "seed", "pip", "reduced_pip"});
    r.add_input("a", o->a);
    r.add_input("b", o->b);
    r.add_row({"a-b", cell(proxy.size()), std::to_string(proxy.seed), cell(d),
               cell(d / (2.0 * static_cast<double>(proxy.size())))});
    emit(r, o->out);
    if (!o->words.empty()) {
      if (o->words_out.empty()) throw UsageError("--words needs --words-out");
      const auto words = read_word_list(o->words);
      const auto losses = wordwise_reduced_pip_losses(words, a, b, proxy);
      Report w("pip-words", {"word", "d_pip"});
      w.add_meta("proxy_size", cell(proxy.size()));
      w.add_meta("proxy_seed", std::to_string(proxy.seed));
      for (std::size_t i = 0; i < words.size(); ++i) w.add_row({words[i], cell(losses[i])});
      emit(w, o->words_out);
    }
  });
}

// --- average -----------------------------------------------------------------

void setup_average(CLI::App& root) {
  auto* app = root.add_subcommand("average", "Binary-tree aligned average of several spaces");
  struct Opts {
    std::vector<fs::path> inputs;
    fs::path out;
    bool no_renorm = false;
    std::string pairing = "given";
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--inputs", o->inputs, "Input spaces")->required()->check(CLI::ExistingFile);
  app->add_option("--out", o->out, "Output vector file")->required();
  app->add_flag("--no-renorm", o->no_renorm, "Do not renormalize intermediate averages");
  app->add_option("--pairing", o->pairing, "given | seeded tree pairing order")
      ->capture_default_str()
      ->check(CLI::IsMember({"given", "seeded"}));
  app->add_option("--seed", o->seed, "Seed for --pairing seeded")->capture_default_str();
  app->callback([o] {
    std::vector<EmbeddingSpace> spaces;
    for (const auto& p : o->inputs) spaces.push_back(normalize(load_space(p)));
    TreeOptions opt;
    opt.renormalize = !o->no_renorm;
    opt.pairing = o->pairing == "seeded" ? Pairing::seeded : Pairing::given;
    opt.seed = o->seed;
    std::vector<std::string> dropped;
    const EmbeddingSpace avg = aligned_average_tree(spaces, opt, &dropped);
    for (const auto& w : dropped)
      std::cerr << "warning: dropped zero-length vector of '" << w << "'\n";
    if (o->out.has_parent_path()) fs::create_directories(o->out.parent_path());
    save_text_vectors(avg, o->out);
    if (avg.vocab().has_frequencies()) {
      auto freq = o->out;
      freq.replace_extension(".freq");
      save_frequencies(avg.vocab(), freq);
    }
  });
}

// --- analogy -----------------------------------------------------------------

void setup_analogy(CLI::App& root) {
  auto* app = root.add_subcommand("analogy", "3CosAdd word-analogy accuracy");
  struct Opts {
    fs::path vectors, dataset, restrict_file, out;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--vectors", o->vectors, "Vector file")->required()->check(CLI::ExistingFile);
  app->add_option("--dataset", o->dataset, "Analogy questions \"a b c d\"")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--restrict", o->restrict_file, "Word list restricting the search vocabulary")
      ->check(CLI::ExistingFile);
  app->add_option("--out", o->out, "Report file (.tsv or .json)")->required();
  app->callback([o] {
    const EmbeddingSpace s = load_text_vectors(o->vectors);
    std::optional<std::vector<std::string>> restrict_to;
    if (!o->restrict_file.empty()) restrict_to = read_word_list(o->restrict_file);
    const AnalogyResult a = analogy_score(s, load_analogy_dataset(o->dataset), restrict_to);
    Report r("analogy", {"accuracy", "coverage", "correct", "answered", "total"});
    r.add_input("vectors", o->vectors);
    r.add_input("dataset", o->dataset);
    r.add_row({cell(a.accuracy), cell(a.coverage), cell(a.correct), cell(a.answered),
               cell(a.total)});
    emit(r, o->out);
  });
}

// --- change ------------------------------------------------------------------

void setup_change(CLI::App& root) {
  auto* app = root.add_subcommand("change", "Semantic change between two epoch spaces");
  struct Opts {
    fs::path t1, t2, targets, gold_binary, gold_graded, out;
    std::uint64_t min_count = 1;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--t1", o->t1, "Earlier epoch space")->required()->check(CLI::ExistingFile);
  app->add_option("--t2", o->t2, "Later epoch space")->required()->check(CLI::ExistingFile);
  app->add_option("--targets", o->targets, "Target word list")->required()->check(CLI::ExistingFile);
  app->add_option("--gold-binary", o->gold_binary, "Gold \"word<TAB>0|1\" file")
      ->check(CLI::ExistingFile);
  app->add_option("--gold-graded", o->gold_graded, "Gold \"word<TAB>score\" file")
      ->check(CLI::ExistingFile);
  app->add_option("--min-count", o->min_count,
                  "Per-epoch count for the vocabulary defining the threshold (needs .freq files)")
      ->capture_default_str();
  app->add_option("--out", o->out, "Output directory")->required();
  app->callback([o] {
    const EmbeddingSpace t1 = load_space(o->t1), t2 = load_space(o->t2);
    const ChangeReport cr = detect_change(t1, t2, read_word_list(o->targets), o->min_count);
    fs::create_directories(o->out);
    Report r("change", {"rank", "word", "delta", "label"});
    r.add_input("t1", o->t1);
    r.add_input("t2", o->t2);
    r.add_input("targets", o->targets);
    r.add_meta("tau", cell(cr.classification.tau));
    r.add_meta("mu", cell(cr.classification.mu));
    r.add_meta("sigma", cell(cr.classification.sigma));
    r.add_meta("scored_vocab_size", cell(cr.scored_vocab.size()));
    r.add_meta("min_count", std::to_string(o->min_count));
    r.add_meta("alignment_residual", cell(cr.residual));
    for (std::size_t i = 0; i < cr.ranking.size(); ++i) {
      const auto& w = cr.ranking[i];
      const bool changed = cr.classification.labels.at(w.word) == ChangeLabel::changed;
      r.add_row({cell(i + 1), w.word, cell(w.delta), changed ? "changed" : "unchanged"});
    }
    emit(r, o->out / "report.tsv");
    write_answers(cr, o->out / "answer_binary.txt", o->out / "answer_graded.txt");
    if (!o->gold_binary.empty() || !o->gold_graded.empty()) {
      const Evaluation e = evaluate(cr, load_gold(o->gold_binary, o->gold_graded));
      Report ev("change-evaluation", {"metric", "value", "targets"});
      if (e.accuracy) ev.add_row({"accuracy", cell(*e.accuracy), cell(e.binary_targets)});
      if (e.rho) {
        ev.add_row({"spearman_rho", cell(*e.rho), cell(e.graded_targets)});
        ev.add_row({"spearman_p", cell(*e.rho_p_value), cell(e.graded_targets)});
      }
      emit(ev, o->out / "evaluation.tsv");
    }
  });
}

// --- conformity --------------------------------------------------------------

void setup_conformity(CLI::App& root) {
  auto* app = root.add_subcommand(
      "conformity", "Frequency effect on semantic change, genuine epochs vs. control batches");
  struct Opts {
    fs::path epochs, out;
    std::size_t runs = 1, avg = 1, control = 0;
    std::uint64_t min_count = 500, seed = 1;
    bool lowercase = false;
    TrainerFlags trainer;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--epochs", o->epochs, "Directory of epoch corpora (*.txt, name order)")
      ->required()
      ->check(CLI::ExistingDirectory);
  app->add_option("--runs", o->runs, "Independent repetitions of the analysis")
      ->capture_default_str();
  app->add_option("--avg", o->avg, "Runs tree-averaged per epoch space")->capture_default_str();
  app->add_option("--control", o->control, "Also fit a control condition with this many batches")
      ->capture_default_str();
  app->add_option("--min-count", o->min_count, "Per-epoch count needed to be scored")
      ->capture_default_str();
  app->add_option("--seed", o->seed, "Global seed")->capture_default_str();
  app->add_flag("--lowercase", o->lowercase, "Lowercase tokens");
  o->trainer.attach(app, true);
  app->add_option("--out", o->out, "Result file (.tsv or .json)")->required();
  app->callback([o] {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(o->epochs))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2) throw DataError("need at least 2 epoch corpora in " + o->epochs.string());
    std::vector<Corpus> epochs;
    for (const auto& f : files) epochs.push_back(load_corpus(f, o->lowercase));

    Report r("conformity", {"condition", "repetition", "beta_f", "beta_f_se", "beta_0",
                            "sigma_z2", "sigma_e2", "var_explained", "observations", "words",
                            "fit_method"});
    for (std::size_t i = 0; i < files.size(); ++i)
      r.add_input("epoch/" + std::to_string(i), files[i]);
    r.add_meta("seed", std::to_string(o->seed));
    r.add_meta("avg", std::to_string(o->avg));
    r.add_meta("min_count", std::to_string(o->min_count));
    const auto add = [&](const std::string& cond, std::size_t rep, const FrequencyEffectResult& f) {
      r.add_row({cond, cell(rep), cell(f.beta_f), cell(f.beta_f_se), cell(f.beta_0),
                 cell(f.sigma_z2), cell(f.sigma_e2), cell(f.var_explained),
                 cell(f.n_observations), cell(f.n_words), f.fit_method});
    };
    for (std::size_t rep = 0; rep < o->runs; ++rep) {
      ConformityConfig c;
      c.trainer = o->trainer.cfg;
      c.fold = o->avg;
      c.min_count = o->min_count;
      c.seed = derive_seed(o->seed, 2 * rep);
      add("genuine", rep, conformity_condition(epochs, c));
      if (o->control > 0) {
        const auto batches = control_condition(epochs, o->control, derive_seed(o->seed, 2 * rep + 1));
        add("control", rep, conformity_condition(batches, c));
      }
    }
    emit(r, o->out);
  });
}

// --- report ------------------------------------------------------------------

void setup_report(CLI::App& root) {
  auto* app = root.add_subcommand("report", "Convert a report between TSV and JSON");
  struct Opts {
    fs::path in, out;
  };
  auto o = std::make_shared<Opts>();
  app->add_option("--in", o->in, "Input report (.tsv or .json)")->required()->check(CLI::ExistingFile);
  app->add_option("--out", o->out, "Output report (.tsv or .json)")->required();
  app->callback([o] {
    const Report r = o->in.extension() == ".json" ? read_json(o->in) : read_tsv(o->in);
    emit(r, o->out);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedstab: word-embedding instability toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  setup_train(app);
  setup_sample(app);
  setup_instability(app);
  setup_overlap(app);
  setup_predict(app);
  setup_pip(app);
  setup_average(app);
  setup_analogy(app);
  setup_change(app);
  setup_conformity(app);
  setup_report(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::data);
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return static_cast<int>(ErrorKind::numerical);
  }
  return 0;
}
