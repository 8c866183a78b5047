#include "qrlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qrlab/dynamics.hpp"
#include "qrlab/error.hpp"
#include "qrlab/experiments.hpp"

namespace qrlab::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ValidationError(where + ": " + what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

Eigen::Index dimension(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 1) fail(where, "expected a positive integer");
  return static_cast<Eigen::Index>(j.get<long long>());
}

Eigen::MatrixXd real_matrix(const json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) fail(where, "expected " + std::to_string(dim) + " rows");
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
      fail(row_where, "expected " + std::to_string(dim) + " columns");
    for (Eigen::Index c = 0; c < dim; ++c)
      m(r, c) = number(row[static_cast<std::size_t>(c)], row_where + "[" + std::to_string(c) + "]");
  }
  return m;
}

Eigen::VectorXd real_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

ComplexMatrix complex_matrix(const json& j, const std::string& where) {
  const Eigen::Index dim = dimension(field(j, "dim", where), where + ".dim");
  ComplexMatrix m = real_matrix(field(j, "re", where), dim, where + ".re").cast<Complex>();
  if (j.contains("im")) m += Complex(0.0, 1.0) * real_matrix(j["im"], dim, where + ".im").cast<Complex>();
  return m;
}

std::filesystem::path resolve(const std::string& ref, const std::filesystem::path& base) {
  std::filesystem::path p(ref);
  if (p.is_relative() && !base.empty() && !std::filesystem::exists(p)) return base / p;
  return p;
}

// Rethrows library validation errors with the document location prefixed.
template <typename F>
auto located(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw ValidationError(where + ": " + msg);
  }
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

HermitianOperator builtin_operator(const std::string& name) {
  if (name == "sx") return sigma_x();
  if (name == "sy") return sigma_y();
  if (name == "sz") return sigma_z();
  auto suffix = [&](const std::string& prefix) -> std::optional<Eigen::Index> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    const std::string rest = name.substr(prefix.size());
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return static_cast<Eigen::Index>(std::stol(rest));
  };
  if (auto n = suffix("id"); n && *n >= 1) return HermitianOperator::identity(*n);
  if (auto n = suffix("ladder_q:")) return ladder_position(*n);
  if (auto n = suffix("ladder_p:")) return ladder_momentum(*n);
  throw ValidationError("unknown builtin operator '" + name + "' (expected sx, sy, sz, id<n>, ladder_q:<n>, ladder_p:<n>)");
}

HermitianOperator operator_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return located(where, [&] { return builtin_operator(j.get<std::string>()); });
  if (j.is_object() && j.contains("builtin")) {
    const auto& name = j["builtin"];
    if (!name.is_string()) fail(where + ".builtin", "expected a string");
    return located(where, [&] { return builtin_operator(name.get<std::string>()); });
  }
  const auto m = complex_matrix(j, where);
  return located(where, [&] { return HermitianOperator(m); });
}

DensityState state_from_json(const json& j, const std::string& where, const std::filesystem::path& base) {
  if (j.is_string()) {
    const auto path = resolve(j.get<std::string>(), base);
    return state_from_json(load_json_file(path), path.string(), path.parent_path());
  }
  if (!j.is_object()) fail(where, "expected a state object or a file path");
  return located(where, [&]() -> DensityState {
    if (j.contains("pure")) {
      const auto& p = j["pure"];
      const Eigen::VectorXd re = real_vector(field(p, "re", where + ".pure"), where + ".pure.re");
      ComplexVector psi = re.cast<Complex>();
      if (p.contains("im")) {
        const Eigen::VectorXd im = real_vector(p["im"], where + ".pure.im");
        if (im.size() != re.size()) fail(where + ".pure.im", "length differs from re");
        psi += Complex(0.0, 1.0) * im.cast<Complex>();
      }
      if (psi.norm() == 0.0) fail(where + ".pure", "zero vector");
      return DensityState::pure(psi / psi.norm());
    }
    if (j.contains("basis")) {
      const auto dim = dimension(field(j, "dim", where), where + ".dim");
      const auto& k = j["basis"];
      if (!k.is_number_integer() || k.get<long long>() < 0 || k.get<long long>() >= dim)
        fail(where + ".basis", "expected an index in [0, dim)");
      return DensityState::basis(dim, static_cast<Eigen::Index>(k.get<long long>()));
    }
    if (j.contains("maximally_mixed"))
      return DensityState::maximally_mixed(dimension(j["maximally_mixed"], where + ".maximally_mixed"));
    if (j.contains("bloch")) {
      const Eigen::VectorXd x = real_vector(j["bloch"], where + ".bloch");
      if (x.size() != 3) fail(where + ".bloch", "expected 3 components");
      if (x.norm() > 1.0 + 1e-12) fail(where + ".bloch", "Bloch vector longer than 1");
      ComplexMatrix m(2, 2);
      m(0, 0) = 0.5 * (1.0 + x(2));
      m(1, 1) = 0.5 * (1.0 - x(2));
      m(0, 1) = Complex(0.5 * x(0), -0.5 * x(1));
      m(1, 0) = std::conj(m(0, 1));
      return DensityState(m);
    }
    if (j.contains("coherent")) {
      const auto& c = j["coherent"];
      const auto dim = dimension(field(c, "dim", where + ".coherent"), where + ".coherent.dim");
      const double q = number(field(c, "q", where + ".coherent"), where + ".coherent.q");
      const double p = number(field(c, "p", where + ".coherent"), where + ".coherent.p");
      return DensityState::pure(coherent_state(dim, q, p));
    }
    if (j.contains("singlet")) return singlet();
    return DensityState(complex_matrix(j, where));
  });
}

Condition condition_from_json(const json& j, const std::string& where, const std::filesystem::path& base) {
  if (j.is_string()) {
    const auto path = resolve(j.get<std::string>(), base);
    return condition_from_json(load_json_file(path), path.string(), path.parent_path());
  }
  const auto& balls = field(j, "balls", where);
  if (!balls.is_array() || balls.empty()) fail(where + ".balls", "expected a nonempty array");
  std::vector<Ball> out;
  for (std::size_t k = 0; k < balls.size(); ++k) {
    const std::string w = where + ".balls[" + std::to_string(k) + "]";
    auto center = state_from_json(field(balls[k], "center", w), w + ".center", base);
    const double radius = number(field(balls[k], "radius", w), w + ".radius");
    if (!(radius > 0.0)) fail(w + ".radius", "radius must be positive");
    out.emplace_back(std::move(center), radius);
  }
  return located(where, [&] { return Condition(std::move(out)); });
}

QrNumber qr_from_json(const json& j, const std::string& where, const std::filesystem::path& base) {
  if (j.is_string()) {
    const auto path = resolve(j.get<std::string>(), base);
    return qr_from_json(load_json_file(path), path.string(), path.parent_path());
  }
  const auto& op = field(j, "op", where);
  if (!op.is_string()) fail(where + ".op", "expected a string");
  const std::string kind = op.get<std::string>();
  auto arg = [&](const char* key) { return qr_from_json(field(j, key, where), where + "." + key, base); };
  auto args = [&]() {
    const auto& a = field(j, "args", where);
    if (!a.is_array() || a.size() != 2) fail(where + ".args", "expected two operands");
    return std::pair{qr_from_json(a[0], where + ".args[0]", base), qr_from_json(a[1], where + ".args[1]", base)};
  };
  return located(where, [&]() -> QrNumber {
    if (kind == "linear") {
      return QrNumber::linear(operator_from_json(field(j, "operator", where), where + ".operator"),
                              condition_from_json(field(j, "condition", where), where + ".condition", base));
    }
    if (kind == "const") {
      return QrNumber::constant(number(field(j, "value", where), where + ".value"),
                                condition_from_json(field(j, "condition", where), where + ".condition", base));
    }
    if (kind == "add" || kind == "sub" || kind == "mul") {
      auto [x, y] = args();
      if (kind == "add") return qr_add(x, y);
      if (kind == "sub") return qr_sub(x, y);
      return qr_mul(x, y);
    }
    if (kind == "scale") return qr_scale(arg("arg"), number(field(j, "factor", where), where + ".factor"));
    if (kind == "apply") {
      const auto& fn = field(j, "fn", where);
      if (!fn.is_string()) fail(where + ".fn", "expected a string");
      std::vector<double> coefficients;
      if (j.contains("coefficients")) {
        const Eigen::VectorXd c = real_vector(j["coefficients"], where + ".coefficients");
        coefficients.assign(c.data(), c.data() + c.size());
      }
      return qr_apply(ContinuousFunction::named(fn.get<std::string>(), std::move(coefficients)), arg("arg"));
    }
    fail(where + ".op", "unknown operation '" + kind + "' (expected linear, const, add, sub, mul, scale, apply)");
  });
}

PosetInput poset_from_json(const json& j, const std::string& where, const std::filesystem::path& base) {
  if (j.is_string()) {
    const auto path = resolve(j.get<std::string>(), base);
    return poset_from_json(load_json_file(path), path.string(), path.parent_path());
  }
  if (!j.is_object()) fail(where, "expected an object");
  PosetInput out;
  if (j.contains("balls")) {
    if (j.contains("order") && j["order"] != "auto") fail(where + ".order", "ball posets support only \"auto\"");
    const auto w = condition_from_json(j, where, base);
    out.basis.emplace(w.balls());
    out.poset = out.basis->poset();
    return out;
  }
  const auto n = dimension(field(j, "size", where), where + ".size");
  const auto& order = field(j, "order", where);
  if (!order.is_array()) fail(where + ".order", "expected a list of [i, j] pairs");
  std::vector<std::vector<bool>> leq(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::string w = where + ".order[" + std::to_string(k) + "]";
    const auto& pair = order[k];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
      fail(w, "expected [i, j]");
    const auto a = pair[0].get<long long>();
    const auto b = pair[1].get<long long>();
    if (a < 0 || b < 0 || a >= n || b >= n) fail(w, "index out of range");
    leq[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
  }
  out.poset = located(where, [&] { return std::make_shared<const Poset>(std::move(leq)); });
  return out;
}

json to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  bool complex = false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
      complex = complex || m(r, c).imag() != 0.0;
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  json out = {{"dim", m.rows()}, {"re", std::move(re)}};
  if (complex) out["im"] = std::move(im);
  return out;
}

json to_json(const DensityState& rho) { return to_json(rho.matrix()); }

json to_json(const Condition& w) {
  json balls = json::array();
  for (const auto& b : w.balls()) balls.push_back({{"center", to_json(b.center())}, {"radius", b.radius()}});
  return {{"balls", std::move(balls)}};
}

json to_json(const Interval& i) { return {{"lo", i.lo}, {"hi", i.hi}}; }

std::string rigor_name(Rigor r) { return r == Rigor::ClosedForm ? "closed_form" : "sampled"; }

json to_json(const RangeInterval& r) {
  return {{"lo", r.lo}, {"hi", r.hi}, {"rigor", rigor_name(r.rigor)}, {"samples", r.samples}, {"seed", r.seed}};
}

json to_json(const CollimationReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) witnesses.push_back({{"clause", w.clause}, {"state", to_json(w.state)}});
  json out = {{"a_range", to_json(r.a_range)},
              {"a_conservative", to_json(r.a_conservative)},
              {"s_range", to_json(r.s_range)},
              {"s_conservative_hi", r.s_conservative_hi},
              {"interval", to_json(r.interval)},
              {"a0", r.interval.midpoint()},
              {"width", r.interval.width()},
              {"eps", r.eps},
              {"clauses",
               {{"mean_within", r.mean_within}, {"lower_bracket", r.lower_bracket}, {"upper_bracket", r.upper_bracket}}},
              {"projection_inf", r.projection_inf},
              {"verdicts", {{"sharp", r.sharp}, {"located", r.located}, {"strict", r.strict}}},
              {"witnesses", std::move(witnesses)}};
  if (r.disturbance_sup) out["disturbance_sup"] = *r.disturbance_sup;
  return out;
}

json to_json(const TruthValue& t) { return t.indices(); }

}  // namespace qrlab::io
