#include "ddestab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ddestab::io {

using json = nlohmann::ordered_json;
using numerics::Complex;

namespace {

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double entry_part(const json& v, const char* what) {
  if (!v.is_number()) fail(ErrorCode::Parse, std::string("matrix entry ") + what + " is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ErrorCode::Parse, "matrix entries must be finite");
  return d;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CMatrix parse_matrix(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("matrix file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc.contains("cols") || !doc.contains("entries")) {
    fail(ErrorCode::Parse, "matrix file needs rows, cols and entries");
  }
  if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer()) {
    fail(ErrorCode::Parse, "rows and cols must be integers");
  }
  const long long rows = doc["rows"].get<long long>();
  const long long cols = doc["cols"].get<long long>();
  const json& entries = doc["entries"];
  if (rows < 1 || cols < 1) fail(ErrorCode::Parse, "rows and cols must be positive");
  if (!entries.is_array() || static_cast<long long>(entries.size()) != rows * cols) {
    fail(ErrorCode::Parse, "entry count must equal rows * cols");
  }
  CMatrix m(rows, cols);
  for (long long k = 0; k < rows * cols; ++k) {
    const json& e = entries[static_cast<std::size_t>(k)];
    Complex z;
    if (e.is_array()) {
      if (e.empty() || e.size() > 2) fail(ErrorCode::Parse, "entry must be [re] or [re, im]");
      z = {entry_part(e[0], "real part"), e.size() == 2 ? entry_part(e[1], "imaginary part") : 0.0};
    } else {
      z = entry_part(e, "value");
    }
    m(k / cols, k % cols) = z;
  }
  return m;
}

std::string matrix_to_json(const CMatrix& m) {
  // Hand-formatted so every double round-trips bit for bit.
  std::ostringstream out;
  out << "{\"rows\": " << m.rows() << ", \"cols\": " << m.cols() << ", \"entries\": [";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i || j) out << ", ";
      out << '[' << format_double(m(i, j).real()) << ", " << format_double(m(i, j).imag()) << ']';
    }
  }
  out << "]}\n";
  return out.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

CMatrix read_matrix(const std::string& path) { return parse_matrix(read_text(path)); }

void write_matrix(const std::string& path, const CMatrix& m) { write_text(path, matrix_to_json(m)); }

std::string report_to_json(const stability::StabilityReport& report) {
  json doc;
  doc["verdict"] = stability::to_string(report.verdict);
  const auto& s = report.scheme;
  doc["scheme"] = {{"theta", s.theta()}, {"u", s.u()}, {"m", s.m()}, {"tau", s.tau()}, {"h", s.h()}};
  json evidence = json::array();
  for (const auto& e : report.evidence) {
    json item;
    item["check"] = stability::to_string(e.check);
    item["passed"] = e.passed;
    item["p"] = e.p ? json(*e.p) : json(nullptr);
    item["index"] = e.index ? json(*e.index) : json(nullptr);
    item["margin"] = number_or_null(e.margin);
    item["note"] = e.note;
    evidence.push_back(std::move(item));
  }
  doc["evidence"] = std::move(evidence);
  doc["failing_check"] = report.failing_check ? json(*report.failing_check) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::string region_csv(const stability::RegionBoundary& region) {
  std::ostringstream out;
  out << "alpha,re,im\n";
  for (const auto& s : region.samples) {
    out << format_double(s.alpha) << ',' << format_double(s.mu.real()) << ','
        << format_double(s.mu.imag()) << '\n';
  }
  return out.str();
}

std::string fov_csv(const fov::FovBoundary& boundary) {
  std::ostringstream out;
  out << "angle,re,im\n";
  for (std::size_t k = 0; k < boundary.n_angles(); ++k) {
    out << format_double(boundary.angles[k]) << ',' << format_double(boundary.points[k].real())
        << ',' << format_double(boundary.points[k].imag()) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const solver::Trajectory& traj, bool norm_only) {
  std::ostringstream out;
  const bool full = !norm_only && traj.states.size() == traj.times.size();
  if (!full) {
    out << "t,norm\n";
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
      out << format_double(traj.times[n]) << ',' << format_double(traj.norms[n]) << '\n';
    }
    return out.str();
  }
  const Eigen::Index dim = traj.final_state.size();
  out << 't';
  for (Eigen::Index i = 0; i < dim; ++i) {
    out << ",y" << i;
    if (!traj.is_real) out << ",y" << i << "_im";
  }
  out << '\n';
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    out << format_double(traj.times[n]);
    for (Eigen::Index i = 0; i < dim; ++i) {
      out << ',' << format_double(traj.states[n](i).real());
      if (!traj.is_real) out << ',' << format_double(traj.states[n](i).imag());
    }
    out << '\n';
  }
  return out.str();
}

std::string snapshot_csv(const solver::Trajectory& traj, const mol::MolProblem& problem) {
  const auto& y = traj.final_state;
  if (y.size() != problem.unknowns()) {
    fail(ErrorCode::InvalidArgument, "snapshot: trajectory does not match the problem");
  }
  std::ostringstream out;
  if (problem.spatial_dims == 1) {
    out << 'x';
    for (int c = 0; c < problem.components; ++c) out << ",v" << (c + 1);
    out << '\n';
    const Eigen::Index per = problem.grid.interior();
    for (Eigen::Index j = 0; j < per; ++j) {
      out << format_double(problem.node(j).x);
      for (int c = 0; c < problem.components; ++c) out << ',' << format_double(y(c * per + j).real());
      out << '\n';
    }
  } else {
    out << "x,y,value\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const auto nd = problem.node(i);
      out << format_double(nd.x) << ',' << format_double(nd.y) << ',' << format_double(y(i).real())
          << '\n';
    }
  }
  return out.str();
}

std::string problem_summary_json(const mol::MolProblem& problem) {
  json doc;
  doc["problem"] = mol::to_string(problem.kind);
  doc["M"] = problem.grid.m;
  doc["dx"] = problem.grid.dx();
  doc["domain_length"] = problem.grid.length;
  doc["unknowns"] = problem.unknowns();
  doc["components"] = problem.components;
  json params = json::object();
  for (const auto& [k, v] : problem.params) params[k] = v;
  doc["parameters"] = params;
  doc["has_exact_solution"] = static_cast<bool>(problem.exact);

  const std::vector<double> w = mol::laplacian_eigenvalues(problem.grid);
  if (problem.kind == mol::ProblemKind::Example1) {
    const double l1 = problem.param("lambda1"), l2 = problem.param("lambda2");
    doc["eigenvalues_a"] = {{"min", -std::min(l1, l2) * w.front()},
                            {"max", -std::max(l1, l2) * w.back()}};
  } else {
    const double lambda = problem.param("lambda");
    doc["eigenvalues_linear"] = {{"min", 2.0 * lambda * w.back()}, {"max", 2.0 * lambda * w.front()}};
    const auto cond = mol::example2_condition(problem.grid.m, lambda, problem.param("reaction_mu"));
    doc["stability_condition"] = {{"holds", cond.holds},
                                  {"threshold", cond.threshold},
                                  {"margin", cond.margin},
                                  {"radius_bound", cond.radius_bound}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace ddestab::io
