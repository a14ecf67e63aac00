#pragma once

// Independent reference implementations. Deliberately naive: recompute
// everything from scratch with no shared code from the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------- TF-IDF

using Doc = std::vector<std::vector<std::string>>;  // [attribute][token]

struct TfidfModel {
  std::vector<std::vector<std::string>> vocab;  // lexicographic, per attribute
  std::vector<std::vector<double>> idf;
  std::size_t k = 0;
  std::vector<double> lo, hi;
};

inline std::vector<double> raw_tfidf(const TfidfModel& m, const Doc& d) {
  std::vector<double> out(m.vocab.size() * m.k, 0.0);
  for (std::size_t a = 0; a < m.vocab.size(); ++a) {
    double norm = 0.0;
    for (std::size_t j = 0; j < m.vocab[a].size(); ++j) {
      double tf = 0.0;
      for (const auto& t : d[a]) tf += t == m.vocab[a][j] ? 1.0 : 0.0;
      out[a * m.k + j] = tf * m.idf[a][j];
      norm += out[a * m.k + j] * out[a * m.k + j];
    }
    if (norm > 0.0) {
      for (std::size_t j = 0; j < m.vocab[a].size(); ++j) out[a * m.k + j] /= std::sqrt(norm);
    }
  }
  return out;
}

inline TfidfModel fit_tfidf(const std::vector<Doc>& docs, std::size_t k) {
  TfidfModel m;
  m.k = k;
  const std::size_t n_attr = docs.front().size();
  for (std::size_t a = 0; a < n_attr; ++a) {
    std::map<std::string, int> tf;
    for (const auto& d : docs) {
      for (const auto& t : d[a]) ++tf[t];
    }
    std::vector<std::pair<int, std::string>> order;
    for (const auto& [t, c] : tf) order.push_back({-c, t});
    std::sort(order.begin(), order.end());
    std::vector<std::string> chosen;
    for (std::size_t i = 0; i < order.size() && i < k; ++i) chosen.push_back(order[i].second);
    std::sort(chosen.begin(), chosen.end());
    std::vector<double> idf;
    for (const auto& t : chosen) {
      int df = 0;
      for (const auto& d : docs) df += std::count(d[a].begin(), d[a].end(), t) > 0 ? 1 : 0;
      idf.push_back(std::log((1.0 + docs.size()) / (1.0 + df)) + 1.0);
    }
    m.vocab.push_back(chosen);
    m.idf.push_back(idf);
  }
  const std::size_t dim = n_attr * k;
  m.lo.assign(dim, 1e300);
  m.hi.assign(dim, -1e300);
  for (const auto& d : docs) {
    const auto v = raw_tfidf(m, d);
    for (std::size_t j = 0; j < dim; ++j) {
      m.lo[j] = std::min(m.lo[j], v[j]);
      m.hi[j] = std::max(m.hi[j], v[j]);
    }
  }
  return m;
}

inline std::vector<double> transform(const TfidfModel& m, const Doc& d) {
  auto v = raw_tfidf(m, d);
  for (std::size_t j = 0; j < v.size(); ++j) {
    double x = v[j] - m.lo[j];
    if (m.hi[j] > m.lo[j]) x /= m.hi[j] - m.lo[j];
    v[j] = std::min(1.0, std::max(0.0, x));
  }
  return v;
}

// ------------------------------------------------------------------ ADWIN

/// Uncompressed ADWIN: after every insertion try every split point; while
/// any split exceeds the bound, discard the oldest element.
class Adwin {
 public:
  explicit Adwin(double delta) : delta_(delta) {}

  bool add(double v) {
    w_.push_back(v);
    bool changed = false;
    while (w_.size() > 1 && has_cut()) {
      w_.erase(w_.begin());
      changed = true;
    }
    return changed;
  }
  const std::vector<double>& window() const { return w_; }

 private:
  bool has_cut() const {
    const double n = static_cast<double>(w_.size());
    for (std::size_t k = 1; k < w_.size(); ++k) {
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t i = 0; i < k; ++i) s0 += w_[i];
      for (std::size_t i = k; i < w_.size(); ++i) s1 += w_[i];
      const double n0 = static_cast<double>(k), n1 = n - n0;
      const double m = 1.0 / (1.0 / n0 + 1.0 / n1);
      const double eps = std::sqrt(std::log(4.0 * n / delta_) / (2.0 * m));
      if (std::abs(s0 / n0 - s1 / n1) > eps) return true;
    }
    return false;
  }

  double delta_;
  std::vector<double> w_;
};

// --------------------------------------------------------------------- KS

inline double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  double best = 0.0;
  for (double x : pooled) {
    double fa = 0.0, fb = 0.0;
    for (double v : a) fa += v <= x ? 1.0 : 0.0;
    for (double v : b) fb += v <= x ? 1.0 : 0.0;
    best = std::max(best, std::abs(fa / a.size() - fb / b.size()));
  }
  return best;
}

// ---------------------------------------------------------------- metrics

struct Counts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Counts recount(const std::vector<std::uint8_t>& pred, const std::vector<std::uint8_t>& truth,
                      std::size_t first = 0, std::size_t last = SIZE_MAX) {
  Counts c;
  last = std::min(last, pred.size());
  for (std::size_t i = first; i < last; ++i) {
    if (pred[i] && truth[i]) ++c.tp;
    else if (pred[i]) ++c.fp;
    else if (truth[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline double f1(const Counts& c) {
  const double p = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
  const double r = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

}  // namespace oracle
