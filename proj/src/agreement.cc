#include "lyricbench/agreement.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lyricbench/error.h"

namespace lyricbench::agreement {

RatingMatrix::RatingMatrix(std::vector<std::vector<int>> counts) : counts_(std::move(counts)) {
  if (counts_.empty() || counts_.front().empty()) throw InvalidArgument("rating matrix is empty");
  const std::size_t k = counts_.front().size();
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const auto& row = counts_[i];
    if (row.size() != k) throw InvalidArgument("rating matrix rows differ in length");
    int sum = 0;
    for (int c : row) {
      if (c < 0) throw InvalidArgument("rating counts must be non-negative");
      sum += c;
    }
    if (i == 0) raters_ = sum;
    if (sum != raters_) {
      throw InvalidArgument("item " + std::to_string(i) + " has " + std::to_string(sum) + " ratings, expected " +
                            std::to_string(raters_));
    }
  }
}

RatingMatrix RatingMatrix::from_ratings(const std::vector<std::vector<int>>& ratings, int categories,
                                        int min_category) {
  if (categories < 1) throw InvalidArgument("categories must be >= 1");
  std::vector<std::vector<int>> counts;
  counts.reserve(ratings.size());
  for (const auto& item : ratings) {
    std::vector<int> row(static_cast<std::size_t>(categories), 0);
    for (int r : item) {
      if (r < min_category || r >= min_category + categories) {
        throw InvalidArgument("rating " + std::to_string(r) + " outside the category range");
      }
      ++row[static_cast<std::size_t>(r - min_category)];
    }
    counts.push_back(std::move(row));
  }
  return RatingMatrix(std::move(counts));
}

double fleiss_kappa(const RatingMatrix& m) {
  const double N = static_cast<double>(m.items());
  const double n = m.raters();
  if (m.items() < 2) throw InvalidArgument("fleiss_kappa needs at least 2 items");
  if (m.raters() < 2) throw InvalidArgument("fleiss_kappa needs at least 2 raters per item");
  std::vector<double> column(m.categories(), 0.0);
  double p_bar = 0.0;
  for (const auto& row : m.counts()) {
    double sq = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      sq += static_cast<double>(row[j]) * row[j];
      column[j] += row[j];
    }
    p_bar += (sq - n) / (n * (n - 1.0));
  }
  p_bar /= N;
  double p_e = 0.0;
  for (double c : column) {
    const double p = c / (N * n);
    p_e += p * p;
  }
  if (p_e >= 1.0) throw InvalidArgument("fleiss_kappa is undefined: every rating is in one category");
  return (p_bar - p_e) / (1.0 - p_e);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson: need at least 2 points");
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidArgument("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> mean_ratings(const std::vector<std::vector<double>>& ratings) {
  std::vector<double> out;
  out.reserve(ratings.size());
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i].empty()) throw InvalidArgument("item " + std::to_string(i) + " has no ratings");
    double s = 0.0;
    for (double r : ratings[i]) s += r;
    out.push_back(s / static_cast<double>(ratings[i].size()));
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

int parse_score(const std::string& s, const std::string& path, std::size_t lineno) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw FormatError(path, lineno, "score '" + s + "' is not an integer");
  }
  if (used != s.size() || v < 1 || v > 5) throw FormatError(path, lineno, "score '" + s + "' not in 1-5");
  return v;
}

}  // namespace

std::vector<Rating> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read ratings " + path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || strip_cr(line) != "item_id,rater_id,fluency,information") {
    throw FormatError(path.string(), 1, "expected header item_id,rater_id,fluency,information");
  }
  std::vector<Rating> out;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 4) throw FormatError(path.string(), lineno, "expected 4 fields");
    if (f[0].empty() || f[1].empty()) throw FormatError(path.string(), lineno, "empty item or rater id");
    out.push_back({f[0], f[1], parse_score(f[2], path.string(), lineno), parse_score(f[3], path.string(), lineno)});
  }
  if (out.empty()) throw FormatError(path.string(), lineno, "no ratings");
  return out;
}

RatingKappas rating_kappas(const std::vector<Rating>& ratings) {
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> by_item;
  for (const auto& r : ratings) {
    by_item[r.item_id].first.push_back(r.fluency);
    by_item[r.item_id].second.push_back(r.information);
  }
  std::vector<std::vector<int>> fluency, information;
  for (auto& [id, pair] : by_item) {
    fluency.push_back(std::move(pair.first));
    information.push_back(std::move(pair.second));
  }
  return {fleiss_kappa(RatingMatrix::from_ratings(fluency)),
          fleiss_kappa(RatingMatrix::from_ratings(information))};
}

std::map<std::string, std::pair<double, double>> item_means(const std::vector<Rating>& ratings) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_item;
  for (const auto& r : ratings) {
    by_item[r.item_id].first.push_back(r.fluency);
    by_item[r.item_id].second.push_back(r.information);
  }
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& [id, pair] : by_item) {
    out[id] = {mean_ratings({pair.first})[0], mean_ratings({pair.second})[0]};
  }
  return out;
}

ScoreTable load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read scores " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string(), 1, "empty score file");
  auto header = split(strip_cr(line), '\t');
  if (header.size() < 2 || header[0] != "item_id") {
    throw FormatError(path.string(), 1, "expected header item_id<TAB>metric...");
  }
  ScoreTable table;
  table.metrics.assign(header.begin() + 1, header.end());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != header.size()) throw FormatError(path.string(), lineno, "wrong number of columns");
    std::vector<double> values;
    for (std::size_t i = 1; i < f.size(); ++i) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(f[i], &used));
        if (used != f[i].size()) throw std::invalid_argument(f[i]);
      } catch (const std::exception&) {
        throw FormatError(path.string(), lineno, "bad number '" + f[i] + "'");
      }
    }
    if (!table.rows.emplace(f[0], std::move(values)).second) {
      throw FormatError(path.string(), lineno, "duplicate item '" + f[0] + "'");
    }
  }
  return table;
}

std::vector<Correlation> correlate(const std::vector<Rating>& ratings, const ScoreTable& scores) {
  const auto means = item_means(ratings);
  std::vector<std::string> ids;
  for (const auto& [id, m] : means) {
    if (scores.rows.count(id)) ids.push_back(id);
  }
  std::vector<Correlation> out;
  for (std::size_t k = 0; k < scores.metrics.size(); ++k) {
    std::vector<double> metric, flu, info;
    for (const auto& id : ids) {
      metric.push_back(scores.rows.at(id)[k]);
      flu.push_back(means.at(id).first);
      info.push_back(means.at(id).second);
    }
    out.push_back({scores.metrics[k], pearson(metric, flu), pearson(metric, info), ids.size()});
  }
  return out;
}

}  // namespace lyricbench::agreement
