// Copyright 2026 The mdport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mdport/probspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "mdport/error.hpp"

namespace mdport {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kCenterTol = 1e-10;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

FiniteProbSpace::FiniteProbSpace(Vector weights) : weights_(std::move(weights)) {
  require(weights_.size() > 0, ErrorCode::kInvalidArgument,
          "probability space needs at least one scenario");
  for (Eigen::Index j = 0; j < weights_.size(); ++j) {
    require(std::isfinite(weights_(j)) && weights_(j) > 0.0,
            ErrorCode::kInvalidArgument,
            "scenario " + std::to_string(j) + " has non-positive probability");
  }
  const double total = weights_.sum();
  require(std::abs(total - 1.0) <= kWeightTol, ErrorCode::kInvalidArgument,
          "probabilities sum to " + std::to_string(total) + ", not 1");
  if (total != 1.0) weights_ /= total;
  const double first = weights_(0);
  uniform_ = (weights_.array() - first).abs().maxCoeff() <= kWeightTol;
}

FiniteProbSpace FiniteProbSpace::uniform(Eigen::Index n) {
  require(n > 0, ErrorCode::kInvalidArgument, "uniform space needs N >= 1");
  return FiniteProbSpace(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

void FiniteProbSpace::check_dimension(const RandomVariable& x, const char* what) const {
  if (x.size() != size()) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + " has " + std::to_string(x.size()) +
             " scenarios, space has " + std::to_string(size()));
  }
}

double FiniteProbSpace::expectation(const RandomVariable& x) const {
  check_dimension(x, "random variable");
  return weights_.dot(x);
}

Vector FiniteProbSpace::expectation_rows(const Matrix& m) const {
  require(m.cols() == size(), ErrorCode::kDimensionMismatch,
          "scenario matrix column count does not match the space");
  return m * weights_;
}

RandomVariable MarketModel::portfolio_return(const Vector& x) const {
  require(x.size() == assets(), ErrorCode::kDimensionMismatch,
          "portfolio has " + std::to_string(x.size()) + " weights, market has " +
              std::to_string(assets()) + " assets");
  return centered_returns.transpose() * x;
}

Eigen::Index numerical_rank(const Matrix& m, double rel_tol) {
  Matrix a = m;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) scale = std::max(scale, a.row(i).norm());
  if (scale == 0.0) return 0;
  const double threshold = rel_tol * scale;
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < cols && rank < rows; ++c) {
    Eigen::Index pivot = rank;
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    if (std::abs(a(pivot, c)) <= threshold) continue;
    a.row(pivot).swap(a.row(rank));
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      const double factor = a(r, c) / a(rank, c);
      a.row(r) -= factor * a.row(rank);
    }
    ++rank;
  }
  return rank;
}

MarketModel MarketModel::from_centered(FiniteProbSpace space, Matrix centered,
                                       Vector mu, double target) {
  require(centered.cols() == space.size(), ErrorCode::kDimensionMismatch,
          "returns have " + std::to_string(centered.cols()) + " scenarios, space has " +
              std::to_string(space.size()));
  require(mu.size() == centered.rows(), ErrorCode::kDimensionMismatch,
          "mu has " + std::to_string(mu.size()) + " entries for " +
              std::to_string(centered.rows()) + " assets");
  require(centered.allFinite() && mu.allFinite(), ErrorCode::kInvalidArgument,
          "returns must be finite");
  const Vector means = space.expectation_rows(centered);
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    require(std::abs(means(i)) <= kCenterTol, ErrorCode::kInvalidArgument,
            "asset " + std::to_string(i) + " returns are not centered (mean " +
                std::to_string(means(i)) + ")");
  }
  const Eigen::Index rank = numerical_rank(centered);
  require(rank == centered.rows(), ErrorCode::kRankDeficient,
          "centered returns have rank " + std::to_string(rank) + " < " +
              std::to_string(centered.rows()) +
              " assets: some non-zero portfolio has a constant return");
  return MarketModel{std::move(space), std::move(centered), std::move(mu), 0.0, target};
}

MarketModel center_market(const Matrix& raw_returns, const FiniteProbSpace& space,
                          double riskless_rate, double target) {
  require(raw_returns.cols() == space.size(), ErrorCode::kDimensionMismatch,
          "returns have " + std::to_string(raw_returns.cols()) +
              " scenarios, space has " + std::to_string(space.size()));
  require(raw_returns.allFinite(), ErrorCode::kInvalidArgument, "returns must be finite");
  const Vector means = space.expectation_rows(raw_returns);
  Matrix centered = raw_returns.colwise() - means;
  // Re-center once more so the residual mean is at rounding level.
  centered.colwise() -= space.expectation_rows(centered);
  Vector mu = means.array() - riskless_rate;
  MarketModel market = MarketModel::from_centered(space, std::move(centered),
                                                  std::move(mu), target);
  market.riskless_rate = riskless_rate;
  return market;
}

ScenarioTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], values[c])) {
        numeric = false;
        bad_col = c;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      width = cells.size();
      if (!numeric) continue;  // header row
    }
    if (!numeric) {
      fail(ErrorCode::kParseError, "CSV row " + std::to_string(line_no) + ", column " +
                                       std::to_string(bad_col + 1) + ": '" +
                                       cells[bad_col] + "' is not a number");
    }
    if (cells.size() != width) {
      fail(ErrorCode::kParseError, "CSV row " + std::to_string(line_no) + " has " +
                                       std::to_string(cells.size()) + " columns, expected " +
                                       std::to_string(width));
    }
    rows.push_back(std::move(values));
  }
  require(!rows.empty(), ErrorCode::kParseError, "CSV contains no scenario rows");
  const auto n_scen = static_cast<Eigen::Index>(rows.size());
  const auto n_assets = static_cast<Eigen::Index>(width);
  Matrix returns(n_assets, n_scen);
  for (Eigen::Index j = 0; j < n_scen; ++j) {
    for (Eigen::Index i = 0; i < n_assets; ++i) returns(i, j) = rows[j][i];
  }
  return ScenarioTable{std::move(returns), FiniteProbSpace::uniform(n_scen)};
}

ScenarioTable ingest_csv(const std::filesystem::path& path) {
  std::ifstream file(path);
  require(file.good(), ErrorCode::kParseError, "cannot open CSV file " + path.string());
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str());
}

}  // namespace mdport
