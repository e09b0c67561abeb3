// SPDX-License-Identifier: Apache-2.0
//
// mmwgen - generative millimeter wave channel models
// Copyright (C) 2026 The mmwgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWGEN_EVAL_STATS_HPP
#define MMWGEN_EVAL_STATS_HPP

// Distribution-level comparison of generated links against test data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwgen/channel_domain.hpp"
#include "mmwgen/channel_generator.hpp"
#include "mmwgen/link_state_model.hpp"

namespace mmwgen {

// Noncoherent power sum over present paths; nullopt for an empty link.
inline std::optional<double> omni_path_loss(const Link& link) {
  double gain = 0.0;
  bool any = false;
  for (const Path& p : link.paths) {
    if (p.loss_db >= kMaxLossDb) continue;
    gain += std::pow(10.0, -p.loss_db / 10.0);
    any = true;
  }
  if (!any) return std::nullopt;
  return -10.0 * std::log10(gain);
}

class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
    require(!sorted_.empty(), ErrorKind::domain, "ecdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  // Fraction of the sample <= x.
  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

// sup_x |F_a(x) - F_b(x)|, evaluated at every pooled sample point.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::domain, "ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double x;
    if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j]))
      x = sa[i];
    else
      x = sb[j];
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

// ---- histograms -----------------------------------------------------------------

struct Histogram2D {
  std::vector<double> edges_x;
  std::vector<double> edges_y;
  std::vector<double> values;       // row-major (x, y); NaN where empty
  std::vector<double> counts;

  Histogram2D() = default;
  Histogram2D(std::vector<double> ex, std::vector<double> ey) : edges_x(std::move(ex)), edges_y(std::move(ey)) {
    require(edges_x.size() >= 2 && edges_y.size() >= 2, ErrorKind::domain, "histogram: need at least one bin per axis");
    for (std::size_t i = 1; i < edges_x.size(); ++i)
      require(edges_x[i] > edges_x[i - 1], ErrorKind::domain, "histogram: x edges must be strictly increasing");
    for (std::size_t i = 1; i < edges_y.size(); ++i)
      require(edges_y[i] > edges_y[i - 1], ErrorKind::domain, "histogram: y edges must be strictly increasing");
    values.assign(nx() * ny(), std::numeric_limits<double>::quiet_NaN());
    counts.assign(nx() * ny(), 0.0);
  }

  std::size_t nx() const { return edges_x.size() - 1; }
  std::size_t ny() const { return edges_y.size() - 1; }
  std::size_t index(std::size_t ix, std::size_t iy) const { return ix * ny() + iy; }
  double value(std::size_t ix, std::size_t iy) const { return values[index(ix, iy)]; }
  double count(std::size_t ix, std::size_t iy) const { return counts[index(ix, iy)]; }
  bool empty(std::size_t ix, std::size_t iy) const { return counts[index(ix, iy)] == 0.0; }

  static std::optional<std::size_t> bin(const std::vector<double>& edges, double v) {
    if (!(v >= edges.front() && v < edges.back())) return std::nullopt;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
  }
};

inline std::vector<double> linear_edges(double lo, double hi, std::size_t bins) {
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  return e;
}

inline std::vector<double> log_edges(double lo, double hi, std::size_t bins) {
  std::vector<double> e(bins + 1);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i <= bins; ++i)
    e[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(bins));
  e.front() = lo;
  e.back() = hi;
  return e;
}

inline std::vector<double> default_distance_edges() { return log_edges(10.0, 1000.0, 12); }
inline std::vector<double> default_angle_edges() { return linear_edges(-180.0, 180.0, 36); }

enum class LosMapSource { empirical_labels, model_probs };

// Per-cell mean of 1{LOS} (empirical) or of predicted p_los (model) over
// (d_h, d_z) bins; half-open bins, empty cells stay NaN with count 0.
inline Histogram2D los_prob_map(std::span<const Link> links, std::vector<double> edges_dh, std::vector<double> edges_dz,
                                LosMapSource source, const LinkStateNet* net = nullptr) {
  require(source == LosMapSource::empirical_labels || net != nullptr, ErrorKind::domain,
          "los_prob_map: model source needs a link-state network");
  Histogram2D h(std::move(edges_dh), std::move(edges_dz));
  std::vector<double> sums(h.values.size(), 0.0);
  for (const Link& l : links) {
    const auto ix = Histogram2D::bin(h.edges_x, l.condition.horizontal_distance());
    const auto iy = Histogram2D::bin(h.edges_y, l.condition.d[2]);
    if (!ix || !iy) continue;
    const double v = source == LosMapSource::empirical_labels ? (l.state == LinkState::los ? 1.0 : 0.0)
                                                              : predict_state_probs(*net, l.condition)[0];
    const std::size_t k = h.index(*ix, *iy);
    sums[k] += v;
    h.counts[k] += 1.0;
  }
  for (std::size_t k = 0; k < sums.size(); ++k)
    if (h.counts[k] > 0.0) h.values[k] = sums[k] / h.counts[k];
  return h;
}

enum class AngleKind { aoa_az, aoa_el, aod_az, aod_el };

inline std::string to_string(AngleKind a) {
  switch (a) {
    case AngleKind::aoa_az: return "aoa_az";
    case AngleKind::aoa_el: return "aoa_el";
    case AngleKind::aod_az: return "aod_az";
    case AngleKind::aod_el: return "aod_el";
  }
  return "aoa_az";
}

inline constexpr std::array<AngleKind, 4> kAllAngles{AngleKind::aoa_az, AngleKind::aoa_el, AngleKind::aod_az,
                                                     AngleKind::aod_el};
inline constexpr std::size_t kStrongestPaths = 10;

// Offset of one of a path's angles from the direct-path direction.
inline double relative_angle(const Path& p, const LosGeometry& g, AngleKind which) {
  switch (which) {
    case AngleKind::aoa_az: return wrap_azimuth(p.aoa_az - g.arrival.azimuth);
    case AngleKind::aoa_el: return p.aoa_el - g.arrival.elevation;
    case AngleKind::aod_az: return wrap_azimuth(p.aod_az - g.departure.azimuth);
    case AngleKind::aod_el: return p.aod_el - g.departure.elevation;
  }
  return 0.0;
}

// Relative angles of the (up to) 10 strongest paths of `link`.
inline std::vector<double> strongest_relative_angles(const Link& link, AngleKind which) {
  std::vector<Path> paths = link.paths;
  sort_by_loss(paths);
  if (paths.size() > kStrongestPaths) paths.resize(kStrongestPaths);
  const LosGeometry g = los_geometry(link.condition.d);
  std::vector<double> out;
  for (const Path& p : paths) out.push_back(relative_angle(p, g, which));
  return out;
}

// Distance x relative-angle mass; each occupied distance column sums to 1.
inline Histogram2D angular_distribution(std::span<const Link> links, std::vector<double> distance_edges,
                                        std::vector<double> angle_edges, AngleKind which) {
  Histogram2D h(std::move(distance_edges), std::move(angle_edges));
  for (const Link& l : links) {
    if (l.paths.empty()) continue;
    const auto ix = Histogram2D::bin(h.edges_x, l.condition.distance());
    if (!ix) continue;
    for (double a : strongest_relative_angles(l, which)) {
      const auto iy = Histogram2D::bin(h.edges_y, a);
      if (!iy) continue;
      h.counts[h.index(*ix, *iy)] += 1.0;
    }
  }
  for (std::size_t ix = 0; ix < h.nx(); ++ix) {
    double col = 0.0;
    for (std::size_t iy = 0; iy < h.ny(); ++iy) col += h.count(ix, iy);
    if (col == 0.0) continue;
    for (std::size_t iy = 0; iy < h.ny(); ++iy) h.values[h.index(ix, iy)] = h.count(ix, iy) / col;
  }
  return h;
}

// sqrt(-2 ln R) in degrees, R the mean resultant length.
inline double circular_std_deg(std::span<const double> angles_deg) {
  require(!angles_deg.empty(), ErrorKind::domain, "circular_std_deg: empty sample");
  double c = 0.0, s = 0.0;
  for (double a : angles_deg) {
    c += std::cos(deg2rad(a));
    s += std::sin(deg2rad(a));
  }
  const double n = static_cast<double>(angles_deg.size());
  const double r = std::min(1.0, std::hypot(c, s) / n);
  return rad2deg(std::sqrt(-2.0 * std::log(std::max(r, 1e-300))));
}

// ---- model vs test report -----------------------------------------------------

struct CellTypeComparison {
  double ks = 0.0;
  std::vector<double> test_values;   // omni path loss, Absent excluded
  std::vector<double> model_values;
  std::size_t test_excluded = 0;     // NoLink links
  std::size_t model_excluded = 0;
};

struct EvalReport {
  std::map<std::string, CellTypeComparison> cells;            // "terrestrial", "aerial"
  std::array<std::array<std::size_t, 3>, 3> state_counts{};   // [test state][generated state]
  std::map<std::string, Histogram2D> angular;                 // "<angle>_<source>"
  std::map<std::string, Histogram2D> los_maps;                // "test", "model"
  std::uint64_t seed = 0;

  double state_rate(LinkState test, LinkState generated) const {
    std::size_t total = 0;
    for (const auto& row : state_counts)
      for (auto c : row) total += c;
    if (total == 0) return 0.0;
    return static_cast<double>(state_counts[static_cast<std::size_t>(test)][static_cast<std::size_t>(generated)]) /
           static_cast<double>(total);
  }
};

struct EvalBins {
  std::vector<double> distance = default_distance_edges();
  std::vector<double> angle = default_angle_edges();
  std::vector<double> los_dh = linear_edges(0.0, 500.0, 20);
  std::vector<double> los_dz = linear_edges(0.0, 130.0, 20);
};

// Pairs test_links[i] with generated[i] (same condition).
inline EvalReport compare_links(std::span<const Link> test_links, std::span<const Link> generated,
                                const EvalBins& bins = {}, const LinkStateNet* net = nullptr) {
  require(test_links.size() == generated.size(), ErrorKind::dimension, "compare_links: test/generated size mismatch");
  require(!test_links.empty(), ErrorKind::domain, "compare_links: empty test set");
  EvalReport r;
  for (CellType c : {CellType::terrestrial, CellType::aerial}) r.cells[to_string(c)];
  for (std::size_t i = 0; i < test_links.size(); ++i) {
    const Link& t = test_links[i];
    const Link& g = generated[i];
    auto& cell = r.cells[to_string(t.condition.cell_type)];
    if (auto v = omni_path_loss(t)) cell.test_values.push_back(*v); else ++cell.test_excluded;
    if (auto v = omni_path_loss(g)) cell.model_values.push_back(*v); else ++cell.model_excluded;
    r.state_counts[static_cast<std::size_t>(t.state)][static_cast<std::size_t>(g.state)] += 1;
  }
  for (auto& [name, cell] : r.cells)
    cell.ks = (cell.test_values.empty() || cell.model_values.empty())
                  ? (cell.test_values.empty() && cell.model_values.empty() ? 0.0 : 1.0)
                  : ks_statistic(cell.test_values, cell.model_values);
  for (AngleKind a : kAllAngles) {
    r.angular[to_string(a) + "_test"] = angular_distribution(test_links, bins.distance, bins.angle, a);
    r.angular[to_string(a) + "_model"] = angular_distribution(generated, bins.distance, bins.angle, a);
  }
  r.los_maps["test"] = los_prob_map(test_links, bins.los_dh, bins.los_dz, LosMapSource::empirical_labels);
  if (net) r.los_maps["model"] = los_prob_map(test_links, bins.los_dh, bins.los_dz, LosMapSource::model_probs, net);
  return r;
}

// One generated link per test condition, then compare_links.
inline EvalReport compare_model_to_test(const ChannelModel& model, std::span<const Link> test_links,
                                        std::uint64_t master_seed, const EvalBins& bins = {},
                                        std::vector<Link>* generated_out = nullptr) {
  std::vector<LinkCondition> conds;
  conds.reserve(test_links.size());
  for (const Link& l : test_links) conds.push_back(l.condition);
  std::vector<Link> generated = generate_batch(model, conds, 1, master_seed);
  EvalReport r = compare_links(test_links, generated, bins, &model.link_state);
  r.seed = master_seed;
  if (generated_out) *generated_out = std::move(generated);
  return r;
}

// ---- report files ---------------------------------------------------------------

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + p.string() + "'");
  f << std::setprecision(17);
  return f;
}

inline std::string fmt_or_empty(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p, const std::string& header) {
  std::ifstream f(p);
  if (!f) throw Error(ErrorKind::io, "cannot open '" + p.string() + "'");
  std::string line;
  if (!std::getline(f, line) || line != header)
    throw Error(ErrorKind::parse, p.string() + ": expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    rows.push_back(std::move(cols));
  }
  return rows;
}

inline double parse_double(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(s);
  } catch (...) {
    throw Error(ErrorKind::parse, "bad number '" + s + "'");
  }
}

}  // namespace detail

inline void write_ecdf_csv(const std::filesystem::path& p, std::span<const double> values) {
  auto f = detail::open_out(p);
  f << "value,cdf\n";
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i)
    f << s[i] << ',' << static_cast<double>(i + 1) / static_cast<double>(s.size()) << '\n';
}

inline void write_losmap_csv(const std::filesystem::path& p, const Histogram2D& h) {
  auto f = detail::open_out(p);
  f << "dh_lo,dh_hi,dz_lo,dz_hi,p,count\n";
  for (std::size_t ix = 0; ix < h.nx(); ++ix)
    for (std::size_t iy = 0; iy < h.ny(); ++iy)
      f << h.edges_x[ix] << ',' << h.edges_x[ix + 1] << ',' << h.edges_y[iy] << ',' << h.edges_y[iy + 1] << ','
        << detail::fmt_or_empty(h.value(ix, iy)) << ',' << h.count(ix, iy) << '\n';
}

inline void write_angdist_csv(const std::filesystem::path& p, const Histogram2D& h) {
  auto f = detail::open_out(p);
  f << "d_lo,d_hi,ang_lo,ang_hi,mass\n";
  for (std::size_t ix = 0; ix < h.nx(); ++ix)
    for (std::size_t iy = 0; iy < h.ny(); ++iy)
      f << h.edges_x[ix] << ',' << h.edges_x[ix + 1] << ',' << h.edges_y[iy] << ',' << h.edges_y[iy + 1] << ','
        << detail::fmt_or_empty(h.value(ix, iy)) << '\n';
}

inline nlohmann::json report_summary(const EvalReport& r) {
  nlohmann::json j;
  nlohmann::json ks, counts;
  for (const auto& [name, c] : r.cells) {
    ks[name] = c.ks;
    counts[name] = {{"test", c.test_values.size()},
                    {"model", c.model_values.size()},
                    {"test_excluded_nolink", c.test_excluded},
                    {"model_excluded_nolink", c.model_excluded}};
  }
  nlohmann::json conf;
  for (LinkState t : kAllStates) {
    nlohmann::json row;
    for (LinkState g : kAllStates) {
      row[to_string(g)] = {{"count", r.state_counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(g)]},
                           {"rate", r.state_rate(t, g)}};
    }
    conf[to_string(t)] = row;
  }
  j["ks"] = ks;
  j["counts"] = counts;
  j["state_confusion"] = conf;
  j["seed"] = r.seed;
  return j;
}

// ecdf_<celltype>_<source>.csv, losmap_<source>.csv, angdist_<angle>_<source>.csv, summary.json
inline void write_report(const EvalReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, c] : r.cells) {
    write_ecdf_csv(dir / ("ecdf_" + name + "_test.csv"), c.test_values);
    write_ecdf_csv(dir / ("ecdf_" + name + "_model.csv"), c.model_values);
  }
  for (const auto& [source, h] : r.los_maps) write_losmap_csv(dir / ("losmap_" + source + ".csv"), h);
  for (const auto& [key, h] : r.angular) write_angdist_csv(dir / ("angdist_" + key + ".csv"), h);
  auto f = detail::open_out(dir / "summary.json");
  f << report_summary(r).dump(1) << '\n';
}

namespace detail {

inline Histogram2D read_grid_csv(const std::filesystem::path& p, const std::string& header, int value_col, int count_col) {
  const auto rows = read_csv(p, header);
  require(!rows.empty(), ErrorKind::parse, p.string() + ": empty grid");
  for (const auto& row : rows)
    require(row.size() >= static_cast<std::size_t>(std::max(value_col, count_col) + 1), ErrorKind::parse,
            p.string() + ": short row");
  // rows are x-major: the first x column spells out the y edges, the first
  // row of every x column spells out the x edges
  const double x_first = parse_double(rows[0][0]);
  const double y_first = parse_double(rows[0][2]);
  std::vector<double> ex{x_first}, ey{y_first};
  for (const auto& row : rows) {
    if (parse_double(row[0]) == x_first) ey.push_back(parse_double(row[3]));
    if (parse_double(row[2]) == y_first) ex.push_back(parse_double(row[1]));
  }
  Histogram2D h(ex, ey);
  require(rows.size() == h.nx() * h.ny(), ErrorKind::parse, p.string() + ": grid is not rectangular");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    h.values[k] = parse_double(rows[k][static_cast<std::size_t>(value_col)]);
    if (count_col >= 0) {
      h.counts[k] = parse_double(rows[k][static_cast<std::size_t>(count_col)]);
    } else {
      h.counts[k] = std::isnan(h.values[k]) ? 0.0 : 1.0;  // masses only; occupancy flag
    }
  }
  return h;
}

}  // namespace detail

// Inverse of write_report. Angular histogram counts are not stored, so the
// recovered counts mark occupancy only.
inline EvalReport read_report(const std::filesystem::path& dir) {
  EvalReport r;
  std::ifstream sf(dir / "summary.json");
  if (!sf) throw Error(ErrorKind::io, "cannot open '" + (dir / "summary.json").string() + "'");
  nlohmann::json j;
  try {
    sf >> j;
    for (const auto& [name, ks] : j.at("ks").items()) {
      auto& c = r.cells[name];
      c.ks = ks.get<double>();
      c.test_excluded = j.at("counts").at(name).at("test_excluded_nolink").get<std::size_t>();
      c.model_excluded = j.at("counts").at(name).at("model_excluded_nolink").get<std::size_t>();
      for (const char* src : {"test", "model"}) {
        auto& vals = std::string(src) == "test" ? c.test_values : c.model_values;
        for (const auto& row : detail::read_csv(dir / ("ecdf_" + name + "_" + src + ".csv"), "value,cdf"))
          vals.push_back(detail::parse_double(row.at(0)));
      }
    }
    for (LinkState t : kAllStates)
      for (LinkState g : kAllStates)
        r.state_counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(g)] =
            j.at("state_confusion").at(to_string(t)).at(to_string(g)).at("count").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("summary.json: ") + e.what());
  }
  for (const char* src : {"test", "model"}) {
    const auto p = dir / (std::string("losmap_") + src + ".csv");
    if (std::filesystem::exists(p)) r.los_maps[src] = detail::read_grid_csv(p, "dh_lo,dh_hi,dz_lo,dz_hi,p,count", 4, 5);
  }
  for (AngleKind a : kAllAngles)
    for (const char* src : {"test", "model"}) {
      const std::string key = to_string(a) + "_" + src;
      r.angular[key] = detail::read_grid_csv(dir / ("angdist_" + key + ".csv"), "d_lo,d_hi,ang_lo,ang_hi,mass", 4, -1);
    }
  return r;
}

}  // namespace mmwgen

#endif
