#include "riskgrid/path_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "riskgrid/error.hpp"
#include "riskgrid/raster_io.hpp"
#include "text_util.hpp"

namespace riskgrid {

namespace fs = std::filesystem;

std::string path_file_name(TupleIndex t) {
  return "path_i" + std::to_string(t.vehicle) + "_j" + std::to_string(t.demand) + "_k" +
         std::to_string(t.path) + ".csv";
}

std::string path_to_csv(TupleIndex t, const GridPath& path) {
  std::string out = "# i=" + std::to_string(t.vehicle) + ",j=" + std::to_string(t.demand) +
                    ",k=" + std::to_string(t.path) + ",lambda=" + format_real(path.lambda) +
                    ",planned_cost=" + format_real(path.planned_cost) + "\nrow,col\n";
  for (Pixel p : path.pixels) {
    out += std::to_string(p.row) + "," + std::to_string(p.col) + "\n";
  }
  return out;
}

PathRecord path_from_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || !lines.front().starts_with("# ")) {
    throw ParseError("path CSV must start with a '# i=..' comment");
  }
  std::map<std::string, std::string_view, std::less<>> fields;
  for (auto kv : detail::split(lines.front().substr(2), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ParseError("path CSV comment: expected key=value");
    fields[std::string(detail::trim(kv.substr(0, eq)))] = kv.substr(eq + 1);
  }
  auto field = [&](const char* key) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(std::string("path CSV comment lacks '") + key + "'");
    return it->second;
  };

  PathRecord rec;
  rec.tuple = {detail::parse_int<int>(field("i")), detail::parse_int<int>(field("j")),
               detail::parse_int<int>(field("k"))};
  rec.path.lambda = parse_real(field("lambda"));
  rec.path.planned_cost = parse_real(field("planned_cost"));
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto line = detail::trim(lines[n]);
    if (line.empty() || line == "row,col") continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != 2) throw ParseError("path CSV: expected 'row,col'");
    rec.path.pixels.push_back({detail::parse_int<int>(cells[0]), detail::parse_int<int>(cells[1])});
  }
  if (rec.path.pixels.empty()) throw ParseError("path CSV has no pixels");
  return rec;
}

void write_candidate_dir(const fs::path& dir, const CandidateSet& candidates) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const TupleIndex t : candidates.tuples()) {
    write_file(dir / path_file_name(t), path_to_csv(t, candidates.path(t)));
  }
}

CandidateSet read_candidate_dir(const fs::path& dir) {
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("path_i") && name.ends_with(".csv")) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  if (files.empty()) throw IoError("no path CSVs in " + dir.string());

  std::map<TupleIndex, GridPath> by_tuple;
  for (const auto& f : files) {
    PathRecord rec = path_from_csv(read_file(f));
    if (!by_tuple.emplace(rec.tuple, std::move(rec.path)).second) {
      throw ParseError("duplicate path for one tuple in " + dir.string());
    }
  }
  int n = 0, m = 0, k = 0;
  for (const auto& [t, p] : by_tuple) {
    n = std::max(n, t.vehicle + 1);
    m = std::max(m, t.demand + 1);
    k = std::max(k, t.path + 1);
  }
  if (by_tuple.size() != static_cast<std::size_t>(n) * m * k) {
    throw InvalidSpec("path directory does not hold K paths for every (vehicle, demand)");
  }

  std::vector<Pixel> vehicles(n), demands(m);
  std::vector<double> lambdas(k);
  std::vector<GridPath> paths;
  paths.reserve(by_tuple.size());
  for (auto& [t, p] : by_tuple) {
    vehicles[t.vehicle] = p.start();
    demands[t.demand] = p.goal();
    lambdas[t.path] = p.lambda;
    paths.push_back(std::move(p));
  }
  // std::map iterates in (vehicle, demand, path) order, which is the slot order.
  return CandidateSet(std::move(vehicles), std::move(demands), std::move(lambdas),
                      std::move(paths));
}

std::string render_overlay_svg(const LabelMap& labels, const VarianceMap& variance,
                               const CandidateSet& candidates,
                               std::span<const TupleIndex> highlighted) {
  constexpr int kCell = 8;
  constexpr std::array<const char*, 8> kClassColors = {"#9e9e9e", "#8bc34a", "#2e7d32",
                                                       "#795548", "#1565c0", "#ffb300",
                                                       "#6a1b9a", "#d84315"};
  constexpr std::array<const char*, 4> kPathColors = {"#0d47a1", "#bf360c", "#00695c", "#4a148c"};

  const int w = labels.width() * kCell;
  const int h = labels.height() * kCell;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                    "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) +
                    " " + std::to_string(h) + "\">\n<g id=\"labels\">\n";
  for (int r = 0; r < labels.height(); ++r) {
    for (int c = 0; c < labels.width(); ++c) {
      out += "<rect x=\"" + std::to_string(c * kCell) + "\" y=\"" + std::to_string(r * kCell) +
             "\" width=\"" + std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) +
             "\" fill=\"" + kClassColors[labels.labels[{r, c}] % kClassColors.size()] + "\"/>\n";
    }
  }
  out += "</g>\n<g id=\"uncertainty\" fill=\"#ff0000\">\n";
  for (int r = 0; r < variance.height(); ++r) {
    for (int c = 0; c < variance.width(); ++c) {
      // Full opacity at the maximum possible variance of 0.25.
      const double alpha = std::min(1.0, variance[{r, c}] / 0.25);
      if (alpha < 0.01) continue;
      out += "<rect x=\"" + std::to_string(c * kCell) + "\" y=\"" + std::to_string(r * kCell) +
             "\" width=\"" + std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) +
             "\" fill-opacity=\"" + format_real(std::round(alpha * 1000.0) / 1000.0) + "\"/>\n";
    }
  }
  out += "</g>\n<g id=\"paths\" fill=\"none\" stroke-linejoin=\"round\">\n";
  for (const TupleIndex t : candidates.tuples()) {
    const bool hot = std::find(highlighted.begin(), highlighted.end(), t) != highlighted.end();
    out += "<polyline data-tuple=\"" + std::to_string(t.vehicle) + "," + std::to_string(t.demand) +
           "," + std::to_string(t.path) + "\" stroke=\"" +
           kPathColors[static_cast<std::size_t>(t.path) % kPathColors.size()] +
           "\" stroke-width=\"" + (hot ? "4" : "1.5") + "\" points=\"";
    bool first = true;
    for (Pixel p : candidates.path(t).pixels) {
      if (!first) out.push_back(' ');
      first = false;
      out += std::to_string(p.col * kCell + kCell / 2) + "," +
             std::to_string(p.row * kCell + kCell / 2);
    }
    out += "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace riskgrid
