#include "embedstab/experiment.hpp"

#include "detail/text.hpp"
#include "embedstab/error.hpp"
#include "embedstab/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace embedstab {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  bool ok = false;
  if constexpr (std::is_floating_point_v<T>)
    ok = detail::parse_double(value, out);
  else
    ok = detail::parse_int(value, out);
  if (!ok) throw UsageError("invalid value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("invalid boolean '" + value + "' for " + key);
}

std::string run_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03zu", i);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (corpus.empty()) throw UsageError("no corpus given");
  if (runs < 1) throw UsageError("runs must be at least 1");
  if (out_dir.empty()) throw UsageError("no output directory given");
  trainer.validate();
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("expected key = value at " + path.string() + ":" + std::to_string(line_no));
    out[std::string(detail::trim(body.substr(0, eq)))] = std::string(detail::trim(body.substr(eq + 1)));
  }
  return out;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "corpus") c.corpus = value;
  else if (key == "sampling") c.sampling = parse_sampling_kind(value);
  else if (key == "runs") c.runs = parse_number<std::size_t>(key, value);
  else if (key == "dim") c.trainer.dim = parse_number<int>(key, value);
  else if (key == "window") c.trainer.window = parse_number<int>(key, value);
  else if (key == "negatives") c.trainer.negatives = parse_number<int>(key, value);
  else if (key == "epochs") c.trainer.epochs = parse_number<int>(key, value);
  else if (key == "lr") c.trainer.initial_lr = parse_number<double>(key, value);
  else if (key == "subsample") c.trainer.subsample_t = parse_number<double>(key, value);
  else if (key == "min_count") c.trainer.min_count = parse_number<std::uint64_t>(key, value);
  else if (key == "threads") c.trainer.threads = parse_number<int>(key, value);
  else if (key == "dynamic_window") c.trainer.dynamic_window = parse_bool(key, value);
  else if (key == "lowercase") c.lowercase = parse_bool(key, value);
  else if (key == "dedup") c.dedup = parse_bool(key, value);
  else if (key == "out") c.out_dir = value;
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else throw UsageError("unknown configuration key '" + key + "'");
}

std::vector<RunArtifact> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Corpus corpus = load_corpus(config.corpus, config.lowercase, config.dedup);
  if (corpus.documents.empty()) throw DataError("corpus " + config.corpus.string() + " is empty");
  std::filesystem::create_directories(config.out_dir);

  std::vector<RunArtifact> runs;
  for (std::size_t i = 0; i < config.runs; ++i) {
    RunArtifact a;
    a.index = i;
    a.seed = config.seed + i;
    try {
      const Corpus sampled = sample(corpus, {config.sampling, a.seed});
      SgnsConfig trainer = config.trainer;
      trainer.seed = a.seed;
      const EmbeddingSpace space = train(sampled, trainer);
      a.vectors = config.out_dir / (run_name(i) + ".vec");
      a.frequencies = config.out_dir / (run_name(i) + ".freq");
      save_text_vectors(space, a.vectors);
      save_frequencies(space.vocab(), a.frequencies);
      a.sha256 = sha256_file(a.vectors);
    } catch (const Error& e) {
      throw Error(e.kind(), "run " + std::to_string(i) + " failed: " + e.what());
    }
    runs.push_back(std::move(a));
  }

  nlohmann::ordered_json m;
  m["tool"] = "embedstab";
  m["version"] = kToolVersion;
  m["corpus"] = {{"path", config.corpus.string()}, {"sha256", sha256_file(config.corpus)}};
  m["sampling"] = std::string(to_string(config.sampling));
  m["runs"] = config.runs;
  m["seed"] = config.seed;
  m["lowercase"] = config.lowercase;
  m["dedup"] = config.dedup;
  const auto& t = config.trainer;
  m["trainer"] = {{"dim", t.dim},           {"window", t.window},
                  {"negatives", t.negatives}, {"epochs", t.epochs},
                  {"lr", t.initial_lr},      {"subsample", t.subsample_t},
                  {"min_count", t.min_count}, {"dynamic_window", t.dynamic_window},
                  {"threads", t.threads}};
  auto& files = m["outputs"] = nlohmann::ordered_json::array();
  for (const auto& a : runs)
    files.push_back({{"run", a.index},
                     {"seed", a.seed},
                     {"vectors", a.vectors.filename().string()},
                     {"sha256", a.sha256}});
  std::ofstream out(config.out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + config.out_dir.string());
  out << m.dump(2) << '\n';
  return runs;
}

}  // namespace embedstab
