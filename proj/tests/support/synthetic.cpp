#include "synthetic.hpp"

#include "embedstab/stats.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unistd.h>

namespace embedstab::testkit {

std::vector<std::string> word_list(std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix random_orthogonal(Eigen::Index d, Rng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

EmbeddingSpace random_space(std::size_t v, Eigen::Index d, std::uint64_t seed, bool normalized,
                            const std::string& prefix) {
  Rng rng(seed);
  Matrix m = gaussian_matrix(static_cast<Eigen::Index>(v), d, rng);
  EmbeddingSpace s(Vocabulary(word_list(v, prefix)), std::move(m), false);
  return normalized ? normalize(s) : s;
}

EmbeddingSpace planted_space(const std::string& target, const std::vector<std::string>& queries,
                             const std::vector<double>& cosines, Eigen::Index dim, Rng& rng) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(queries.size() + 1), dim);
  m(0, 0) = 1.0;
  for (std::size_t l = 0; l < queries.size(); ++l) {
    RowVector u(dim);
    u(0) = 0.0;
    for (Eigen::Index k = 1; k < dim; ++k) u(k) = rng.normal();
    u /= u.norm();
    const double c = cosines[l];
    RowVector row = std::sqrt(std::max(0.0, 1.0 - c * c)) * u;
    row(0) = c;
    m.row(static_cast<Eigen::Index>(l + 1)) = row / row.norm();
  }
  std::vector<std::string> words{target};
  words.insert(words.end(), queries.begin(), queries.end());
  return EmbeddingSpace(Vocabulary(std::move(words)), std::move(m), true);
}

StabilityProfile make_profile(const std::string& target, const std::vector<double>& mus,
                              const std::vector<double>& sigmas, std::size_t r) {
  StabilityProfile p;
  p.target = target;
  for (std::size_t i = 0; i < mus.size(); ++i)
    p.entries.push_back({target, "q" + std::to_string(i), mus[i], sigmas[i], r});
  return p;
}

std::vector<double> sample_cosines(const StabilityProfile& profile, Rng& rng) {
  std::vector<double> out;
  out.reserve(profile.entries.size());
  for (const auto& e : profile.entries)
    out.push_back(std::clamp(rng.normal(e.mu, e.sigma), -1.0, 1.0));
  return out;
}

Corpus topic_corpus(std::size_t documents, std::size_t topics, std::size_t words_per_topic,
                    std::size_t doc_length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cdf(words_per_topic);
  double acc = 0.0;
  for (std::size_t i = 0; i < words_per_topic; ++i) cdf[i] = acc += 1.0 / static_cast<double>(i + 1);
  for (double& c : cdf) c /= acc;
  Corpus c;
  for (std::size_t d = 0; d < documents; ++d) {
    const std::size_t t = static_cast<std::size_t>(rng.below(topics));
    Document doc;
    for (std::size_t k = 0; k < doc_length; ++k) {
      const auto i = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), rng.uniform()) - cdf.begin());
      doc.push_back("t" + std::to_string(t) + "_" + std::to_string(std::min(i, words_per_topic - 1)));
    }
    c.documents.push_back(std::move(doc));
  }
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("embedstab_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace embedstab::testkit

namespace embedstab::testkit {

namespace {

double wrap(double a) {
  const double tau = 2.0 * std::numbers::pi;
  a = std::fmod(a, tau);
  return a < 0.0 ? a + tau : a;
}

std::size_t slot(double angle, std::size_t n) {
  const auto i = static_cast<std::size_t>(wrap(angle) / (2.0 * std::numbers::pi) * static_cast<double>(n));
  return std::min(i, n - 1);
}

}  // namespace

DiachronicCorpus diachronic_corpus(const DiachronicSpec& s) {
  Rng rng(s.seed);
  DiachronicCorpus out;
  std::vector<double> logn(s.targets);
  for (auto& l : logn) l = rng.uniform(std::log(s.count_lo), std::log(s.count_hi));
  const double m = mean(logn), sd = sample_stddev(logn);

  // z and e are drawn, then made exactly orthogonal to (1, f~) and rescaled,
  // so the in-sample regression slope of y on f~ is beta_f exactly.
  const std::size_t pairs = s.epochs - 1;
  std::vector<double> f(s.targets), z(s.targets);
  std::vector<std::vector<double>> noise(pairs, std::vector<double>(s.targets));
  for (std::size_t w = 0; w < s.targets; ++w) {
    f[w] = (logn[w] - m) / sd;
    z[w] = rng.normal();
    for (auto& e : noise) e[w] = rng.normal();
  }
  const auto orthogonalize = [&](std::vector<double>& v, double scale) {
    const double mv = mean(v);
    double fv = 0.0, ff = 0.0;
    for (std::size_t w = 0; w < v.size(); ++w) {
      fv += f[w] * (v[w] - mv);
      ff += f[w] * f[w];
    }
    for (std::size_t w = 0; w < v.size(); ++w) v[w] -= mv + fv / ff * f[w];
    const double k = scale / sample_stddev(v);
    for (double& x : v) x *= k;
  };
  orthogonalize(z, s.sigma_z);
  for (auto& e : noise) orthogonalize(e, s.sigma_e);

  std::vector<double> start(s.targets);
  for (std::size_t w = 0; w < s.targets; ++w) {
    out.targets.push_back("x" + std::to_string(w));
    out.counts.push_back(std::round(std::exp(logn[w])));
    start[w] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> steps;
    for (std::size_t e = 0; e < pairs; ++e)
      steps.push_back(s.step_mid * std::exp(s.spread * (s.beta_f * f[w] + z[w] + noise[e][w])));
    out.steps.push_back(std::move(steps));
  }

  for (std::size_t e = 0; e < s.epochs; ++e) {
    Corpus c;
    std::vector<std::vector<std::size_t>> by_bin(s.bins);
    for (std::size_t d = 0; d < s.documents; ++d) {
      const double centre = rng.uniform(0.0, 2.0 * std::numbers::pi);
      by_bin[slot(centre, s.bins)].push_back(d);
      Document doc;
      for (std::size_t i = 0; i < s.doc_length; ++i)
        doc.push_back("f" + std::to_string(slot(centre + s.context_width * rng.normal(), s.fillers)));
      c.documents.push_back(std::move(doc));
    }
    for (std::size_t w = 0; w < s.targets; ++w) {
      double phi = start[w];
      for (std::size_t k = 0; k < e; ++k) phi += out.steps[w][k];
      const auto n = static_cast<std::size_t>(out.counts[w]);
      for (std::size_t i = 0; i < n; ++i) {
        // Nearest non-empty bin; with many documents the first is almost always it.
        std::size_t b = slot(phi + s.target_width * rng.normal(), s.bins);
        while (by_bin[b].empty()) b = (b + 1) % s.bins;
        c.documents[by_bin[b][rng.below(by_bin[b].size())]].push_back(out.targets[w]);
      }
    }
    for (auto& doc : c.documents)
      for (std::size_t i = doc.size(); i > 1; --i) std::swap(doc[i - 1], doc[rng.below(i)]);
    out.epochs.push_back(std::move(c));
  }
  return out;
}

}  // namespace embedstab::testkit

namespace embedstab::testkit {

ContextSwapCorpus context_swap_corpus(std::size_t documents, std::size_t topics,
                                      std::size_t words_per_topic, std::size_t doc_length,
                                      std::size_t pseudo_count, std::size_t control_topics,
                                      std::size_t controls_per_topic, std::uint64_t seed,
                                      const std::string& pseudoword) {
  ContextSwapCorpus out;
  out.pseudoword = pseudoword;
  Rng rng(derive_seed(seed, 0));
  const auto plant = [&](Corpus& c, std::size_t topic) {
    const std::string prefix = "t" + std::to_string(topic) + "_";
    std::vector<std::size_t> docs;
    for (std::size_t d = 0; d < c.documents.size(); ++d)
      if (c.documents[d].front().starts_with(prefix)) docs.push_back(d);
    for (std::size_t i = 0; i < pseudo_count; ++i) {
      auto& doc = c.documents[docs[rng.below(docs.size())]];
      doc.insert(doc.begin() + static_cast<std::ptrdiff_t>(rng.below(doc.size() + 1)), pseudoword);
    }
  };
  out.t1 = topic_corpus(documents, topics, words_per_topic, doc_length, derive_seed(seed, 1));
  out.t2 = topic_corpus(documents, topics, words_per_topic, doc_length, derive_seed(seed, 2));
  plant(out.t1, 0);
  plant(out.t2, 1);
  for (std::size_t k = 0; k < control_topics; ++k)
    for (std::size_t i = 0; i < controls_per_topic; ++i)
      out.controls.push_back("t" + std::to_string(k) + "_" + std::to_string(i));
  return out;
}

}  // namespace embedstab::testkit
