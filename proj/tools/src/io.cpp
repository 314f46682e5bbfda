#include "grj/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "grj/error.hpp"

namespace grj::cli {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidInput, what);
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  require(j.is_object(), what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    require(allowed.count(key) != 0, "unknown key '" + key + "' in " + what);
  }
}

std::size_t count_field(const Json& j, const char* key, const std::string& what) {
  const bool ok = j.contains(key) && j.at(key).is_number_integer() &&
                  (j.at(key).is_number_unsigned() || j.at(key).get<std::int64_t>() >= 0);
  require(ok, what + " needs a non-negative integer '" + key + "'");
  return j.at(key).get<std::size_t>();
}

Json real_vector(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Json complex_list(const std::vector<Scalar>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(Json::array({number(z.real()), number(z.imag())}));
  return out;
}

Json matrix_list(const std::vector<OperatorMatrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

Json decay_to_json(const GeometricDecay& d) { return Json{{"c", number(d.c)}, {"rho", number(d.rho)}}; }

}  // namespace

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json matrix_to_json(const OperatorMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back(Json::array({number(m(i, j).real()), number(m(i, j).imag())}));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

OperatorMatrix matrix_from_json(const Json& j) {
  reject_unknown(j, {"rows", "cols", "entries"}, "matrix");
  const std::size_t r = count_field(j, "rows", "matrix");
  const std::size_t c = count_field(j, "cols", "matrix");
  require(j.contains("entries") && j.at("entries").is_array(), "matrix needs an 'entries' array");
  const Json& e = j.at("entries");
  require(e.size() == r * c, "matrix entries do not match rows * cols");
  OperatorMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  std::size_t k = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t jj = 0; jj < c; ++jj, ++k) {
      const Json& z = e.at(k);
      require(z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number(),
              "matrix entry must be a [re, im] pair of numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) = Scalar(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

Json real_matrix_to_json(const RealMatrix& m) { return matrix_to_json(m.cast<Scalar>()); }

Json subspace_to_json(const Subspace& s) {
  return Json{{"ambient", s.ambient_dim()}, {"basis", matrix_to_json(s.basis())}};
}

Subspace subspace_from_json(const Json& j, const Tolerance& tol) {
  reject_unknown(j, {"ambient", "basis"}, "subspace");
  const std::size_t n = count_field(j, "ambient", "subspace");
  require(j.contains("basis"), "subspace needs a 'basis'");
  const OperatorMatrix b = matrix_from_json(j.at("basis"));
  require(static_cast<std::size_t>(b.rows()) == n, "subspace basis rows differ from 'ambient'");
  return Subspace::span(b, tol);
}

Json model_to_json(const ModelFile& m) {
  Json j;
  if (!m.id.empty()) j["id"] = m.id;
  j["p"] = m.ar.p;
  j["dim"] = m.ar.dim;
  j["norm"] = std::string(to_string(m.ar.norm));
  j["coeffs"] = matrix_list(m.ar.coeffs);
  if (m.cov.size() != 0) j["cov"] = matrix_to_json(m.cov);
  return j;
}

ModelFile model_from_json(const Json& j) {
  reject_unknown(j, {"id", "p", "dim", "norm", "coeffs", "cov"}, "model file");
  ModelFile m;
  if (j.contains("id")) {
    require(j.at("id").is_string(), "model 'id' must be a string");
    m.id = j.at("id").get<std::string>();
  }
  const std::size_t p = count_field(j, "p", "model file");
  const std::size_t dim = count_field(j, "dim", "model file");
  NormKind norm = NormKind::two;
  if (j.contains("norm")) {
    require(j.at("norm").is_string(), "model 'norm' must be a string");
    norm = parse_norm_kind(j.at("norm").get<std::string>());
  }
  require(j.contains("coeffs") && j.at("coeffs").is_array(), "model file needs a 'coeffs' array");
  std::vector<OperatorMatrix> coeffs = matrices_from_json(j.at("coeffs"));
  require(coeffs.size() == p, "model 'p' differs from the number of coefficients");
  for (const auto& a : coeffs) {
    require(static_cast<std::size_t>(a.rows()) == dim && static_cast<std::size_t>(a.cols()) == dim,
            "model coefficient shape differs from 'dim'");
  }
  m.ar = make_ar_pencil(std::move(coeffs), norm);
  const auto n = static_cast<Eigen::Index>(dim);
  m.cov = j.contains("cov") ? matrix_from_json(j.at("cov")) : OperatorMatrix(OperatorMatrix::Identity(n, n));
  require(m.cov.rows() == n && m.cov.cols() == n, "model 'cov' must be dim x dim");
  return m;
}

Json ma_to_json(const MaRepresentation& ma) {
  return Json{{"coeffs", matrix_list(ma.coeffs)}, {"cov", matrix_to_json(ma.innovation_cov)}};
}

MaRepresentation ma_from_json(const Json& j, const Tolerance& tol) {
  reject_unknown(j, {"coeffs", "cov"}, "MA model file");
  require(j.contains("coeffs") && j.at("coeffs").is_array(), "MA model needs a 'coeffs' array");
  require(j.contains("cov"), "MA model needs 'cov'");
  return make_ma(matrices_from_json(j.at("coeffs")), matrix_from_json(j.at("cov")), tol);
}

std::vector<OperatorMatrix> matrices_from_json(const Json& list) {
  require(list.is_array(), "expected a list of matrices");
  std::vector<OperatorMatrix> out;
  for (const auto& m : list) out.push_back(matrix_from_json(m));
  return out;
}

Json spectrum_to_json(const SpectrumReport& s) {
  return Json{{"eigenvalues", complex_list(s.eigenvalues)},
              {"pencil_spectrum", complex_list(s.pencil_spectrum)},
              {"eta", number(s.eta)},
              {"has_unit_root", s.has_unit_root},
              {"unit_root_ok", s.unit_root_ok},
              {"unit_multiplicity", s.unit_multiplicity},
              {"unit_cluster_center", Json::array({number(s.unit_cluster_center.real()),
                                                   number(s.unit_cluster_center.imag())})},
              {"nearest_other_distance", number(s.nearest_other_distance)},
              {"others", complex_list(s.others)},
              {"offending", complex_list(s.offending)}};
}

Json contour_to_json(const ContourInfo& c) {
  return Json{{"center", Json::array({number(c.center.real()), number(c.center.imag())})},
              {"radius", number(c.radius)},
              {"nodes", c.nodes},
              {"last_change", number(c.last_change)}};
}

Json pole_order_to_json(const PoleOrder& p) {
  Json ratios = Json::array();
  for (double r : p.nilpotency_ratios) ratios.push_back(number(r));
  return Json{{"order", p.order},
              {"nilpotency_index", p.nilpotency_index},
              {"ascent", p.ascent},
              {"ascent_agrees", p.ascent_agrees},
              {"essential_flag", p.essential_flag},
              {"nilpotency_ratios", ratios},
              {"contour", contour_to_json(p.contour)}};
}

Json expansion_to_json(const LaurentExpansion& ex) {
  Json coeffs = Json::object();
  for (const auto& [j, m] : ex.coeffs) coeffs[std::to_string(j)] = matrix_to_json(m);
  return Json{{"pole_order", ex.pole_order},
              {"coeffs", coeffs},
              {"contour", contour_to_json(ex.contour)},
              {"p_operator", matrix_to_json(ex.p_operator)},
              {"g_operator", matrix_to_json(ex.g_operator)},
              {"reconstruction_error", number(ex.reconstruction_error)},
              {"idempotency_residual", number(ex.idempotency_residual)},
              {"commutation_residual", number(ex.commutation_residual)}};
}

Json sweep_to_json(const SweepResult& s) {
  Json pts = Json::array();
  for (const auto& pt : s.points) {
    pts.push_back(Json{{"dim", pt.dim}, {"order", pt.order}, {"nilpotency_index", pt.nilpotency_index}});
  }
  return Json{{"points", pts}, {"essential_flag", s.essential_flag}};
}

Json i1_to_json(const I1Report& r) {
  Json j{{"holds", r.holds},
         {"unit_root_ok", r.unit_root_ok},
         {"ker_dim", r.ker_dim},
         {"ran_dim", r.ran_dim},
         {"defect", r.defect},
         {"ker", subspace_to_json(r.ker)},
         {"ran", subspace_to_json(r.ran)}};
  if (!r.holds) return j;
  j["p_operator"] = matrix_to_json(r.p_operator);
  j["long_run"] = matrix_to_json(r.long_run);
  j["h_coeffs"] = matrix_list(r.h_coeffs);
  j["h_decay"] = decay_to_json(r.h_decay);
  j["cross_check_residual"] = number(r.cross_check_residual);
  j["h_cross_check_residual"] = number(r.h_cross_check_residual);
  j["attractor_proper"] = r.attractor_proper;
  return j;
}

Json i2_to_json(const I2Report& r) {
  Json j{{"holds", r.holds},
         {"unit_root_ok", r.unit_root_ok},
         {"diagnostic", r.diagnostic},
         {"ker", subspace_to_json(r.ker)},
         {"ran", subspace_to_json(r.ran)},
         {"k_space", subspace_to_json(r.k_space)},
         {"w_space", subspace_to_json(r.w_space)},
         {"defect", r.defect}};
  if (!r.holds) return j;
  j["w_c"] = subspace_to_json(r.w_c);
  j["k_c"] = subspace_to_json(r.k_c);
  j["w_c_rule"] = r.w_c_rule;
  j["k_c_rule"] = r.k_c_rule;
  j["gen_inverse"] = matrix_to_json(r.gen_inverse);
  j["q"] = matrix_to_json(r.q);
  j["q_g"] = matrix_to_json(r.q_g);
  j["n_minus2"] = matrix_to_json(r.n_minus2);
  j["p_op"] = matrix_to_json(r.p_op);
  j["gamma_l"] = matrix_to_json(r.gamma_l);
  j["gamma_r"] = matrix_to_json(r.gamma_r);
  j["long_run2"] = matrix_to_json(r.long_run2);
  j["long_run1"] = matrix_to_json(r.long_run1);
  j["h_coeffs"] = matrix_list(r.h_coeffs);
  j["h_decay"] = decay_to_json(r.h_decay);
  j["cross_check_residual"] = number(r.cross_check_residual);
  j["h_cross_check_residual"] = number(r.h_cross_check_residual);
  j["attractor_proper"] = r.attractor_proper;
  return j;
}

Json cointegration_to_json(const CointegrationReport& r) {
  return Json{{"attractor", subspace_to_json(r.attractor)},
              {"cointegrating", subspace_to_json(r.cointegrating)},
              {"dims",
               Json{{"attractor", r.dim_attractor}, {"cointegrating", r.dim_cointegrating}, {"defect", r.defect}}},
              {"long_run_cov", matrix_to_json(r.long_run_cov)},
              {"assumption_ok", r.assumption_ok},
              {"note", r.note}};
}

Json beveridge_nelson_to_json(const BeveridgeNelson& bn) {
  return Json{{"a", matrix_to_json(bn.a)},
              {"tilde_coeffs", matrix_list(bn.tilde)},
              {"reconstruction_residual", number(bn.reconstruction_residual)}};
}

Json check_to_json(const RepresentationCheck& c) {
  return Json{{"class", to_string(c.cls)},
              {"max_residual", number(c.max_residual)},
              {"threshold", number(c.threshold)},
              {"passes", c.passes},
              {"tau0", real_vector(c.tau0)},
              {"tau1", real_vector(c.tau1)},
              {"tau0_exact", real_vector(c.tau0_exact)},
              {"tau1_exact", real_vector(c.tau1_exact)},
              {"filter_residual", number(c.filter_residual)},
              {"j_used", c.j_used},
              {"tail_bound", number(c.tail_bound)},
              {"max_state_norm", number(c.max_state_norm)}};
}

Json slope_to_json(const SlopeResult& s) {
  return Json{{"slope", number(s.slope)},
              {"std_error", number(s.std_error)},
              {"stationary", s.stationary},
              {"method", to_string(s.method)}};
}

Json probe_to_json(const PolynomialProbe& p) {
  auto items = [](const std::vector<ProbeItem>& v) {
    Json out = Json::array();
    for (const auto& i : v) out.push_back(Json{{"functional", real_vector(i.functional)}, {"result", slope_to_json(i.result)}});
    return out;
  };
  return Json{{"tier1", real_matrix_to_json(p.tier1)},
              {"tier0", real_matrix_to_json(p.tier0)},
              {"differences_tier1", items(p.differences_tier1)},
              {"levels_tier0", items(p.levels_tier0)},
              {"levels_tier1_only", items(p.levels_tier1_only)},
              {"differences_outside", items(p.differences_outside)},
              {"two_tier", p.two_tier}};
}

Json cointegration_probe_to_json(const CointegrationProbe& p) {
  Json coint = Json::array();
  for (const auto& i : p.cointegrating) {
    coint.push_back(Json{{"functional", real_vector(i.functional)}, {"result", slope_to_json(i.result)}});
  }
  Json loaded = Json::array();
  for (const auto& i : p.loaded) {
    loaded.push_back(Json{{"functional", real_vector(i.functional)},
                          {"result", slope_to_json(i.result)},
                          {"expected_slope", number(i.expected)},
                          {"relative_error", number(i.relative_error)}});
  }
  return Json{{"cointegrating", coint}, {"loaded", loaded}};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string path_to_csv(const SamplePath& path) {
  std::string out = "t";
  for (std::size_t i = 0; i < path.dim(); ++i) out += ",coord_" + std::to_string(i);
  out += '\n';
  for (Eigen::Index t = 0; t < path.states.rows(); ++t) {
    out += std::to_string(t + 1);
    for (Eigen::Index i = 0; i < path.states.cols(); ++i) {
      out += ',';
      out += format_double(path.states(t, i));
    }
    out += '\n';
  }
  return out;
}

RealMatrix states_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line.rfind("t", 0) == 0, "path CSV needs a header");
  const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  require(cols > 0, "path CSV has no coordinates");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      require(res.ec == std::errc() && res.ptr == cell.data() + cell.size(), "bad number '" + cell + "' in path CSV");
      row.push_back(v);
    }
    require(row.size() == cols, "path CSV row has the wrong number of columns");
    rows.push_back(std::move(row));
  }
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < cols; ++i) m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = rows[t][i];
  }
  return m;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write '" + path + "'");
  out << text;
}

}  // namespace grj::cli
