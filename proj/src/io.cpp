#include "cqlqg/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cqlqg::io {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << text;
  if (!out) throw ParseError(path + ": write failed");
}

[[noreturn]] void rethrow_with_position(const std::string& path,
                                        const std::string& text,
                                        std::size_t byte, const char* what) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw ParseError(path + ":" + std::to_string(line) + ":" +
                   std::to_string(col) + ": " + what);
}

json parse_document(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    rethrow_with_position(path, text, e.byte, e.what());
  }
}

const json& member(const json& doc, const std::string& key,
                   const std::string& path) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(path + ": missing key '" + key + "'");
  return *it;
}

Mat parse_matrix(const json& j, const std::string& key,
                 const std::string& path) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ParseError(path + ": '" + key + "' must be an array of number rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Mat M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(path + ": '" + key + "' has ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_number())
        throw ParseError(path + ": '" + key + "' has a non-numeric entry");
      M(i, k) = cell.get<double>();
    }
  }
  return M;
}

json matrix_to_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

int parse_dim(const json& dims, const std::string& key,
              const std::string& path) {
  const json& v = member(dims, key, path);
  if (!v.is_number_integer())
    throw ParseError(path + ": dims." + key + " must be an integer");
  return v.get<int>();
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double(const std::string& cell, const std::string& path,
                    std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": bad numeric cell '" + cell + "'");
  return v;
}

}  // namespace

PlantModel load_plant(const std::string& path) {
  const json doc = parse_document(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be an object");

  const json& dims = member(doc, "dims", path);
  PlantDims dm{};
  dm.n = parse_dim(dims, "n", path);
  dm.m1 = parse_dim(dims, "m1", path);
  dm.m2 = parse_dim(dims, "m2", path);
  dm.p1 = parse_dim(dims, "p1", path);
  dm.p2 = parse_dim(dims, "p2", path);
  dm.r = parse_dim(dims, "r", path);

  const auto matrix = [&](const char* key) {
    return parse_matrix(member(doc, key, path), key, path);
  };
  std::optional<Mat> theta1;
  if (doc.contains("theta1"))
    theta1 = parse_matrix(doc["theta1"], "theta1", path);

  try {
    return PlantModel(dm, matrix("A"), matrix("B"), matrix("C"), matrix("D"),
                      matrix("E"), matrix("F"), matrix("G"), matrix("d"),
                      std::move(theta1));
  } catch (const DimensionError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_plant(const std::string& path, const PlantModel& plant) {
  json doc;
  doc["dims"] = {{"n", plant.dims.n},   {"m1", plant.dims.m1},
                 {"m2", plant.dims.m2}, {"p1", plant.dims.p1},
                 {"p2", plant.dims.p2}, {"r", plant.dims.r}};
  doc["A"] = matrix_to_json(plant.A);
  doc["B"] = matrix_to_json(plant.B);
  doc["C"] = matrix_to_json(plant.C);
  doc["D"] = matrix_to_json(plant.D);
  doc["E"] = matrix_to_json(plant.E);
  doc["F"] = matrix_to_json(plant.F);
  doc["G"] = matrix_to_json(plant.G);
  doc["d"] = matrix_to_json(plant.d);
  if (plant.Theta1 != ccr_block(plant.dims.n))
    doc["theta1"] = matrix_to_json(plant.Theta1);
  write_file(path, dump(doc));
}

ControllerParams load_controller(const std::string& path) {
  const json doc = parse_document(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be an object");
  ControllerParams u;
  u.R = parse_matrix(member(doc, "R", path), "R", path);
  u.b = parse_matrix(member(doc, "b", path), "b", path);
  u.e = parse_matrix(member(doc, "e", path), "e", path);
  if (u.R.rows() != u.R.cols())
    throw ParseError(path + ": R must be square");
  if ((u.R - u.R.transpose()).norm() > 1e-12 * (1.0 + u.R.norm()))
    throw ParseError(path + ": R must be symmetric");
  return u;
}

void save_controller(const std::string& path, const PlantModel& plant,
                     const ControllerParams& u, double pr_tol) {
  const auto real = realize_controller(plant, u);
  const auto sys = assemble(plant, real);
  const auto rep = check_controller_pr(plant, real, pr_tol);

  json doc;
  doc["R"] = matrix_to_json(u.R);
  doc["b"] = matrix_to_json(u.b);
  doc["e"] = matrix_to_json(u.e);
  doc["a"] = matrix_to_json(real.a);
  doc["c"] = matrix_to_json(real.c);
  doc["stabilizing"] = sys.hurwitz;
  if (sys.hurwitz) {
    const Mat P = solve_lyapunov(sys.A, sys.B * sys.B.transpose(), false).X;
    doc["cost"] = 0.5 * (sys.C * P * sys.C.transpose()).trace();
  } else {
    doc["cost"] = nullptr;
  }

  Eigen::EigenSolver<Mat> es(sys.A, /*computeEigenvectors=*/false);
  std::vector<std::pair<double, double>> eigs;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    eigs.emplace_back(es.eigenvalues()(i).real(), es.eigenvalues()(i).imag());
  std::sort(eigs.begin(), eigs.end());
  json jeigs = json::array();
  for (const auto& [re, im] : eigs) jeigs.push_back(json::array({re, im}));
  doc["eigenvalues"] = std::move(jeigs);

  json checks;
  for (const auto& [name, chk] : rep.checks)
    checks[name] = {{"residual", chk.residual},
                    {"scale", chk.scale},
                    {"pass", chk.pass}};
  doc["pr"] = {{"checks", std::move(checks)},
               {"tol", rep.tol},
               {"pass", rep.pass}};
  write_file(path, dump(doc));
}

SolverConfig load_config(const std::string& path, SolverConfig base) {
  const json doc = parse_document(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "h_max") base.h_max = value.get<double>();
    else if (key == "f") base.f = value.get<double>();
    else if (key == "sigma") base.sigma = value.get<double>();
    else if (key == "epsilon") base.epsilon = value.get<double>();
    else if (key == "max_iters") base.max_iters = value.get<long>();
    else if (key == "armijo_max_mu") base.armijo_max_mu = value.get<int>();
    else if (key == "hurwitz_margin") base.hurwitz_margin = value.get<double>();
    else if (key == "rng_seed") base.rng_seed = value.get<std::uint64_t>();
    else if (key == "fd_second_derivative")
      base.fd_second_derivative = value.get<bool>();
    else
      throw ParseError(path + ": unknown config key '" + key + "'");
  }
  base.validate();
  return base;
}

void save_trace(const std::string& path,
                const std::vector<IterateRecord>& trace) {
  std::string text = "k,cost,grad_norm,horizon,stepsize,armijo_j,u_norm\n";
  for (const auto& row : trace) {
    text += std::to_string(row.k) + ',' + fmt17(row.cost) + ',' +
            fmt17(row.grad_norm) + ',' + fmt17(row.horizon) + ',' +
            fmt17(row.stepsize) + ',' + std::to_string(row.armijo_j) + ',' +
            fmt17(row.u_norm) + '\n';
  }
  write_file(path, text);
}

std::vector<IterateRecord> load_trace(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) ||
      line != "k,cost,grad_norm,horizon,stepsize,armijo_j,u_norm")
    throw ParseError(path + ":1: bad or missing trace header");

  std::vector<IterateRecord> trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 7)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 7 cells");
    IterateRecord row;
    row.k = static_cast<long>(parse_double(cells[0], path, lineno));
    row.cost = parse_double(cells[1], path, lineno);
    row.grad_norm = parse_double(cells[2], path, lineno);
    row.horizon = parse_double(cells[3], path, lineno);
    row.stepsize = parse_double(cells[4], path, lineno);
    row.armijo_j = static_cast<int>(parse_double(cells[5], path, lineno));
    row.u_norm = parse_double(cells[6], path, lineno);
    if (row.k != static_cast<long>(trace.size()))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": k must increase from 0");
    if (!trace.empty() && !(row.cost < trace.back().cost))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": cost column must strictly decrease");
    trace.push_back(row);
  }
  return trace;
}

void save_flow_trace(const std::string& path,
                     const std::vector<FlowRecord>& records) {
  std::string text = "k,cost,u_norm,balance_residual,dir_dot_u\n";
  for (const auto& row : records) {
    text += std::to_string(row.k) + ',' + fmt17(row.cost) + ',' +
            fmt17(row.u_norm) + ',' + fmt17(row.balance_residual) + ',' +
            fmt17(row.dir_dot_u) + '\n';
  }
  write_file(path, text);
}

void write_svg_plot(const std::string& path,
                    const std::vector<IterateRecord>& trace, double emin) {
  if (!(emin > 0.0))
    throw PreconditionError("write_svg_plot: emin must be > 0");
  std::vector<std::pair<double, double>> pts;  // (k, log10 deviation)
  for (const auto& row : trace) {
    const double dev = row.cost / emin - 1.0;
    if (dev > 0.0 && std::isfinite(dev))
      pts.emplace_back(static_cast<double>(row.k), std::log10(dev));
  }
  if (pts.empty())
    throw Error("write_svg_plot: no positive relative deviations to plot");

  const double W = 900, H = 560, ML = 80, MR = 24, MT = 24, MB = 52;
  double xmax = pts.back().first;
  if (xmax <= 0.0) xmax = 1.0;
  double ylo = pts[0].second, yhi = pts[0].second;
  for (const auto& p : pts) {
    ylo = std::min(ylo, p.second);
    yhi = std::max(yhi, p.second);
  }
  ylo = std::floor(ylo);
  yhi = std::ceil(yhi);
  if (yhi - ylo < 1.0) yhi = ylo + 1.0;

  const auto px = [&](double k) { return ML + (W - ML - MR) * (k / xmax); };
  const auto py = [&](double y) {
    return H - MB - (H - MT - MB) * ((y - ylo) / (yhi - ylo));
  };
  char buf[160];
  std::string svg;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                W, H, W, H);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Decade gridlines and labels.
  for (double y = ylo; y <= yhi + 0.5; y += 1.0) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"#dddddd\"/>\n",
                  ML, py(y), W - MR, py(y));
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                  "text-anchor=\"end\" font-family=\"monospace\">1e%+.0f</text>\n",
                  ML - 6, py(y) + 4, y);
    svg += buf;
  }
  // A handful of x ticks.
  const int xticks = 6;
  for (int t = 0; t <= xticks; ++t) {
    const double k = xmax * t / xticks;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                  "stroke=\"#bbbbbb\"/>\n",
                  px(k), H - MB, px(k), H - MB + 5);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                  "text-anchor=\"middle\" font-family=\"monospace\">%.0f</text>\n",
                  px(k), H - MB + 20, k);
    svg += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                "fill=\"none\" stroke=\"black\"/>\n",
                ML, MT, W - ML - MR, H - MT - MB);
  svg += buf;
  svg += "<text x=\"" + std::to_string((ML + W - MR) / 2) + "\" y=\"" +
         std::to_string(H - 10) +
         "\" font-size=\"13\" text-anchor=\"middle\" "
         "font-family=\"monospace\">k</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%.2f\" font-size=\"13\" "
                "text-anchor=\"middle\" font-family=\"monospace\" "
                "transform=\"rotate(-90 16 %.2f)\">cost/emin - 1</text>\n",
                (MT + H - MB) / 2, (MT + H - MB) / 2);
  svg += buf;

  std::string poly = "<polyline fill=\"none\" stroke=\"#1f6fb4\" "
                     "stroke-width=\"1.5\" points=\"";
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(p.first), py(p.second));
    poly += buf;
  }
  poly += "\"/>\n";
  svg += poly;
  svg += "</svg>\n";
  write_file(path, svg);
}

}  // namespace cqlqg::io
