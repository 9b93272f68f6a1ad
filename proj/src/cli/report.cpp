#include "drrbdo/cli/report.hpp"

#include <charconv>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "drrbdo/errors.hpp"

namespace drrbdo::cli {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigurationError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigurationError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigurationError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
    if (!quote) {
      line += cells[i];
      continue;
    }
    line += '"';
    for (char c : cells[i]) {
      if (c == '"') line += '"';
      line += c;
    }
    line += '"';
  }
  return line + '\n';
}

nlohmann::json to_json(const truss::MarginBreakdown& m) {
  return {{"deterministic", m.deterministic}, {"worst_mean", m.worst_mean}, {"sigma_dot_w", m.sigma_dot_w},
          {"norm_penalty", m.norm_penalty},   {"kappa_sq_z", m.kappa_sq_z}, {"total", m.total()}};
}

nlohmann::json to_json(const robust::OuterIterate& it) {
  return {{"iteration", it.iteration},
          {"areas", std::vector<double>(it.areas.begin(), it.areas.end())},
          {"volume", it.volume},
          {"compliance", it.compliance},
          {"epigraph", it.epigraph},
          {"relative_change", it.relative_change},
          {"margin", it.margin},
          {"solver_iterations", it.solver_iterations}};
}

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.begin(), v.end()}; }

Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

}  // namespace

nlohmann::json SolveReport::to_json(const truss::TrussModel& m) const {
  nlohmann::json doc;
  doc["mode"] = mode;
  doc["status"] = status;
  doc["model"] = model;
  if (uncertainty) doc["uncertainty"] = *uncertainty;
  if (kappa) doc["kappa"] = *kappa;
  nlohmann::json d;
  d["areas"] = as_vector(design.areas);
  d["areas_mm2"] = as_vector(design.areas * m.area_unit());
  d["volume"] = design.volume;
  d["compliance"] = design.compliance;
  d["gradient"] = as_vector(design.gradient);
  doc["design"] = std::move(d);
  if (nominal_volume) {
    doc["nominal_volume"] = *nominal_volume;
    doc["volume_ratio"] = design.volume / *nominal_volume;
  }
  if (design.margin) doc["margin"] = cli::to_json(*design.margin);
  if (certificate) {
    const auto& w = certificate->W;
    std::vector<double> flat;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) flat.push_back(w(i, j));
    doc["certificate"] = {{"z", certificate->z}, {"W", flat}};
  }
  auto its = nlohmann::json::array();
  for (const auto& it : iterations) its.push_back(cli::to_json(it));
  doc["iterations"] = std::move(its);
  return doc;
}

SolveReport SolveReport::from_json(const nlohmann::json& doc) {
  SolveReport r;
  try {
    r.mode = doc.at("mode").get<std::string>();
    if (r.mode != "nominal" && r.mode != "robust") throw ConfigurationError("report: unknown mode " + r.mode);
    r.status = doc.at("status").get<std::string>();
    r.model = doc.at("model");
    if (doc.contains("uncertainty")) r.uncertainty = doc.at("uncertainty");
    if (r.mode == "robust" && !r.uncertainty) throw ConfigurationError("report: robust mode without uncertainty");
    if (doc.contains("kappa")) r.kappa = doc.at("kappa").get<double>();
    const auto& d = doc.at("design");
    r.design.areas = as_eigen(d.at("areas").get<std::vector<double>>());
    r.design.volume = d.at("volume").get<double>();
    r.design.compliance = d.at("compliance").get<double>();
    r.design.gradient = as_eigen(d.at("gradient").get<std::vector<double>>());
    if (doc.contains("nominal_volume")) r.nominal_volume = doc.at("nominal_volume").get<double>();
    if (doc.contains("margin")) {
      const auto& m = doc.at("margin");
      truss::MarginBreakdown b;
      b.deterministic = m.at("deterministic").get<double>();
      b.worst_mean = m.at("worst_mean").get<double>();
      b.sigma_dot_w = m.at("sigma_dot_w").get<double>();
      b.norm_penalty = m.at("norm_penalty").get<double>();
      b.kappa_sq_z = m.at("kappa_sq_z").get<double>();
      r.design.margin = b;
    }
    if (doc.contains("certificate")) {
      robust::RobustCertificate c;
      c.z = doc.at("certificate").at("z").get<double>();
      const auto flat = doc.at("certificate").at("W").get<std::vector<double>>();
      const Eigen::Index n = r.design.areas.size();
      if (Eigen::Index(flat.size()) != n * n) throw ConfigurationError("report: certificate W has wrong size");
      c.W = Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(flat.data(), n, n);
      if (r.design.margin) c.margin = *r.design.margin;
      r.certificate = std::move(c);
    }
    for (const auto& it : doc.at("iterations")) {
      robust::OuterIterate o;
      o.iteration = it.at("iteration").get<int>();
      o.areas = as_eigen(it.at("areas").get<std::vector<double>>());
      o.volume = it.at("volume").get<double>();
      o.compliance = it.at("compliance").get<double>();
      o.epigraph = it.at("epigraph").get<double>();
      o.relative_change = it.at("relative_change").get<double>();
      o.margin = it.at("margin").get<double>();
      o.solver_iterations = it.at("solver_iterations").get<int>();
      r.iterations.push_back(std::move(o));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("solve report: ") + e.what());
  }
  return r;
}

SolveReport SolveReport::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open solve report " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
}

std::string solution_csv(const truss::TrussModel& model, const truss::DesignPoint& design) {
  std::vector<std::string> header, row;
  for (Eigen::Index j = 0; j < design.areas.size(); ++j) {
    header.push_back("x" + std::to_string(j + 1));
    row.push_back(format_number(design.areas(j) * model.area_unit()));
  }
  header.insert(header.end(), {"obj_val", "pi"});
  row.push_back(format_number(design.volume));
  row.push_back(format_number(design.compliance));
  return csv_row(header) + csv_row(row);
}

}  // namespace drrbdo::cli
