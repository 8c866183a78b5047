#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "qrlab/cli.hpp"
#include "qrlab/collimation.hpp"
#include "qrlab/dynamics.hpp"
#include "qrlab/error.hpp"
#include "qrlab/experiments.hpp"
#include "qrlab/heyting.hpp"
#include "qrlab/io.hpp"

namespace qrlab::cli {

namespace {

using io::json;

struct Budget {
  std::size_t samples = 256;
  std::uint64_t seed = 0;
  std::size_t refine = 48;

  SampleBudget get() const { return {samples, seed, refine}; }
};

struct Options {
  std::string output;
  std::string format = "json";

  std::string qr, op, op_b, condition, state, poset, projection, u_condition, trajectories;
  std::vector<double> interval, interval_b, u_left, u_right, angles, centers, plus, minus;
  double eps = 0.0;
  double delta = 0.0;
  double k = 1.0;
  bool strict = false;
  std::string check = "laws";

  std::string potential = "harmonic";
  double lambda = 0.1;
  long dim = 60;
  double t_end = 2.0 * std::numbers::pi;
  double dt = 1e-2;
  double q0 = 1.0, p0 = 0.0, radius = 0.01;

  std::size_t count = 1000;
  double ontic_fraction = 0.1;
  std::size_t range_samples = 8;

  long points = 200;
  double lo = -10.0, hi = 10.0, width = 0.5;

  Budget budget;
};

// Outcome of one command.
struct Outcome {
  json inputs = json::object();
  json result = json::object();
  std::string rigor = "exact";
  bool property_ok = true;
  std::string property;
  json tolerances = json::object();
  std::optional<std::string> csv;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json base_tolerances() {
  return {{"hermitian", kHermitianTolerance},
          {"psd_clamp", kPsdClampTolerance},
          {"trace", kTraceTolerance},
          {"boundary_margin", kBoundaryMargin},
          {"degeneracy_gap", kDegeneracyGap},
          {"unitary", kUnitaryTolerance}};
}

// Flag values may name a JSON file, an inline JSON document or (for
// operators) a builtin name.
json read_input(const std::string& flag, const std::string& value, Outcome& o) {
  json doc;
  if (!value.empty() && (value.front() == '{' || value.front() == '[')) {
    try {
      doc = json::parse(value);
    } catch (const json::parse_error& e) {
      throw ValidationError("--" + flag + ": malformed inline JSON (" + e.what() + ")");
    }
  } else if (std::filesystem::is_regular_file(value)) {
    doc = io::load_json_file(value);
  } else {
    doc = value;
  }
  o.inputs[flag] = doc;
  return doc;
}

std::filesystem::path base_of(const std::string& value) {
  if (std::filesystem::is_regular_file(value)) return std::filesystem::path(value).parent_path();
  return {};
}

HermitianOperator load_operator(const std::string& flag, const std::string& value, Outcome& o) {
  return io::operator_from_json(read_input(flag, value, o), "--" + flag);
}

DensityState load_state(const std::string& flag, const std::string& value, Outcome& o) {
  const auto doc = read_input(flag, value, o);
  if (doc.is_string()) throw ValidationError("--" + flag + ": no such file '" + value + "'");
  return io::state_from_json(doc, "--" + flag, base_of(value));
}

Condition load_condition(const std::string& flag, const std::string& value, Outcome& o) {
  const auto doc = read_input(flag, value, o);
  if (doc.is_string()) throw ValidationError("--" + flag + ": no such file '" + value + "'");
  return io::condition_from_json(doc, "--" + flag, base_of(value));
}

Interval load_interval(const std::vector<double>& v, const char* flag) {
  if (v.size() != 2) throw ValidationError(std::string("--") + flag + ": expected two numbers LO HI");
  try {
    return make_interval(v[0], v[1]);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("--") + flag + ": " + e.what());
  }
}

Vec3 load_direction(const std::vector<double>& v, const char* flag) {
  if (v.size() != 3) throw ValidationError(std::string("--") + flag + ": expected three components");
  return {v[0], v[1], v[2]};
}

QrNumber load_section(const Options& opt, Outcome& o, bool condition_optional = false) {
  if (!opt.qr.empty()) {
    const auto doc = read_input("qr", opt.qr, o);
    if (doc.is_string()) throw ValidationError("--qr: no such file '" + opt.qr + "'");
    return io::qr_from_json(doc, "--qr", base_of(opt.qr));
  }
  if (opt.op.empty()) throw ValidationError("either --qr or --op is required");
  const auto a = load_operator("op", opt.op, o);
  if (opt.condition.empty()) {
    if (!condition_optional) throw ValidationError("--condition is required with --op");
    return QrNumber::linear(a, Condition::whole(a.dim()));
  }
  return QrNumber::linear(a, load_condition("condition", opt.condition, o));
}

std::string labels(const TruthValue& t) {
  std::string s = "U={";
  bool first = true;
  for (auto i : t.indices()) {
    if (!first) s += ",";
    s += "b" + std::to_string(i + 1);
    first = false;
  }
  return s + "}";
}

// ---- commands ----

void cmd_eval(const Options& opt, Outcome& o) {
  const auto q = load_section(opt, o);
  const auto rho = load_state("state", opt.state, o);
  o.result = {{"value", q.eval_at(rho)}};
}

void cmd_range(const Options& opt, Outcome& o) {
  const auto q = load_section(opt, o);
  const auto r = eval_range(q, opt.budget.get());
  o.result = io::to_json(r);
  o.result["enclosure"] = io::to_json(enclosure(q));
  o.result["lipschitz"] = lipschitz_bound(q);
  o.rigor = io::rigor_name(r.rigor);
}

void cmd_collimate(const Options& opt, Outcome& o) {
  const auto a = load_operator("op", opt.op, o);
  const auto w = load_condition("condition", opt.condition, o);
  const auto interval = load_interval(opt.interval, "interval");
  const auto report = opt.strict ? is_strictly_eps_sharp(a, interval, opt.eps, w, opt.budget.get())
                                 : is_eps_sharp(a, interval, opt.eps, w, opt.budget.get());
  o.result = io::to_json(report);
  o.rigor = report.a_range.rigor == Rigor::ClosedForm && !opt.strict ? "closed_form" : "sampled";
  if (report.sharp && !report.located) {
    o.property_ok = false;
    o.property = "sharp collimation without location";
  }
}

void cmd_locate(const Options& opt, Outcome& o) {
  const auto q = load_section(opt, o, true);
  const auto interval = load_interval(opt.interval, "interval");
  const auto doc = read_input("poset", opt.poset, o);
  const auto input = io::poset_from_json(doc, "--poset", base_of(opt.poset));
  if (!input.basis) throw ValidationError("--poset: locate needs a poset of balls");
  const auto t = locate_proposition(q, interval, *input.basis, opt.budget.get());
  o.result = {{"members", io::to_json(t)}, {"labels", labels(t)}, {"size", input.basis->size()}};
  o.rigor = "sampled";
}

void cmd_heisenberg(const Options& opt, Outcome& o) {
  const auto a = load_operator("op", opt.op, o);
  const auto b = load_operator("op-b", opt.op_b, o);
  const auto w = load_condition("condition", opt.condition, o);
  const auto ia = load_interval(opt.interval, "interval");
  const auto ib = load_interval(opt.interval_b, "interval-b");
  const auto h = heisenberg_check(a, b, ia, ib, opt.eps, w, opt.budget.get());
  o.result = {{"both_sharp", h.both_sharp},
              {"lhs", h.lhs},
              {"rhs", h.rhs},
              {"commutator_inf_abs", h.commutator_inf_abs},
              {"commutator_range", io::to_json(h.commutator_range)},
              {"satisfied", h.satisfied},
              {"a", io::to_json(h.a_report)},
              {"b", io::to_json(h.b_report)}};
  o.rigor = h.commutator_range.rigor == Rigor::ClosedForm ? "closed_form" : "sampled";
  if (h.both_sharp && !h.satisfied) {
    o.property_ok = false;
    o.property = "uncertainty inequality violated under sharp collimation";
  }
}

void cmd_logic(const Options& opt, Outcome& o) {
  const auto doc = read_input("poset", opt.poset, o);
  const auto input = io::poset_from_json(doc, "--poset", base_of(opt.poset));
  const auto& p = input.poset;
  o.result["size"] = p->size();
  if (opt.check == "lem" || opt.check == "dne") {
    const auto witness = excluded_middle_witness(p);
    const std::string key = opt.check == "lem" ? "lem_holds" : "dne_holds";
    o.result[key] = !witness.has_value();
    if (witness) {
      o.result["witness"] = labels(*witness);
      o.result["witness_members"] = io::to_json(*witness);
      o.result["negation"] = io::to_json(neg(*witness));
      if (opt.check == "lem") o.result["join"] = io::to_json(join(*witness, neg(*witness)));
      else o.result["double_negation"] = io::to_json(neg(neg(*witness)));
    } else {
      o.result["witness"] = nullptr;
    }
    return;
  }
  if (opt.check != "laws") throw ValidationError("--check: expected lem, dne or laws");
  const auto all = all_downsets(p);
  if (all.size() > 256) throw ValidationError("--check laws: more than 256 downsets; poset too large to check exhaustively");
  std::size_t triples = 0, adjunction = 0, distributivity = 0, contradiction = 0, double_negation = 0;
  for (const auto& u : all) {
    if (!meet(u, neg(u)).members().none()) ++contradiction;
    if (!u.subset_of(neg(neg(u)))) ++double_negation;
    for (const auto& v : all)
      for (const auto& w : all) {
        ++triples;
        if (meet(w, u).subset_of(v) != w.subset_of(implies(u, v))) ++adjunction;
        if (!(meet(u, join(v, w)) == join(meet(u, v), meet(u, w)))) ++distributivity;
      }
  }
  o.result["downsets"] = all.size();
  o.result["triples"] = triples;
  o.result["failures"] = {{"adjunction", adjunction},
                          {"distributivity", distributivity},
                          {"non_contradiction", contradiction},
                          {"double_negation_inclusion", double_negation}};
  if (adjunction + distributivity + contradiction + double_negation > 0) {
    o.property_ok = false;
    o.property = "Heyting law failure";
  }
}

void cmd_dynamics(const Options& opt, Outcome& o) {
  ModelSpec spec{opt.dim, parse_potential(opt.potential), opt.lambda};
  const auto model = build_model(spec);
  const auto center = DensityState::pure(coherent_state(spec.dim, opt.q0, opt.p0));
  const auto w = Condition::ball(center, opt.radius);
  const auto times = make_time_grid(opt.t_end, opt.dt);
  const auto classical = qr_hamilton_evolve(model, w, times, opt.budget.get());
  const auto quantum = heisenberg_average_evolve(model, w, times, opt.budget.get());
  const auto cmp = compare_evolutions(classical, quantum);

  o.result = {{"sup_dev", cmp.sup_dev},
              {"linear_equal", cmp.linear_equal},
              {"dev_curve", cmp.dev_curve},
              {"times", times},
              {"truncation_max", quantum.truncation_max},
              {"truncation_warning", quantum.truncation_warning},
              {"samples", classical.samples.size()}};
  o.rigor = "sampled";
  o.tolerances["evolution"] = kEvolutionTolerance;
  o.tolerances["truncation"] = kTruncationThreshold;
  // Equality is only claimed while the truncation diagnostic stays small.
  if (spec.potential != Potential::Quartic && !quantum.truncation_warning &&
      !(cmp.sup_dev <= kEvolutionTolerance + quantum.truncation_max)) {
    o.property_ok = false;
    o.property = "linear-force trajectories differ";
  }

  std::ostringstream csv;
  csv << "sample_id,t,q_hamilton,p_hamilton,q_heisenberg,p_heisenberg\n";
  for (std::size_t s = 0; s < classical.samples.size(); ++s)
    for (std::size_t k = 0; k < times.size(); ++k)
      csv << s << "," << fmt(times[k]) << "," << fmt(classical.samples[s].q[k]) << ","
          << fmt(classical.samples[s].p[k]) << "," << fmt(quantum.samples[s].q[k]) << ","
          << fmt(quantum.samples[s].p[k]) << "\n";
  if (!opt.trajectories.empty()) {
    std::ofstream f(opt.trajectories);
    if (!f) throw ValidationError("--trajectories: cannot write '" + opt.trajectories + "'");
    f << csv.str();
  }
  o.csv = csv.str();
}

EnsembleSpec ensemble(const Options& opt, Outcome& o, const DensityState& fallback) {
  EnsembleSpec spec{opt.state.empty() ? fallback : load_state("state", opt.state, o)};
  spec.eps = opt.eps;
  spec.count = opt.count;
  spec.ontic_fraction = opt.ontic_fraction;
  spec.seed = opt.budget.seed;
  spec.range_samples = opt.range_samples;
  return spec;
}

void cmd_bell(const Options& opt, Outcome& o) {
  const auto spec = ensemble(opt, o, singlet());
  const auto r = bell_bohm(load_direction(opt.u_left, "uL"), load_direction(opt.u_right, "uR"), spec);
  o.result = {{"mean", r.mean},
              {"target", r.target},
              {"bound", r.bound},
              {"deviation", std::abs(r.mean - r.target)},
              {"pairs", r.values.size()},
              {"pairs_within", r.pairs_within},
              {"max_pair_gap", r.max_pair_gap},
              {"pass", r.pass}};
  o.rigor = "sampled";
  if (!r.pass || !r.pairs_within) {
    o.property_ok = false;
    o.property = r.pass ? "per-pair bound violated" : "mean outside bound";
  }
  std::ostringstream csv;
  csv << "pair_id,value\n";
  for (std::size_t n = 0; n < r.values.size(); ++n) csv << n << "," << fmt(r.values[n]) << "\n";
  o.csv = csv.str();
}

void cmd_chsh(const Options& opt, Outcome& o) {
  if (opt.angles.size() != 4) throw ValidationError("--angles: expected four angles in degrees");
  const auto spec = ensemble(opt, o, singlet());
  auto dir = [](double deg) { return xz_direction(deg * std::numbers::pi / 180.0); };
  const auto r = chsh(dir(opt.angles[0]), dir(opt.angles[1]), dir(opt.angles[2]), dir(opt.angles[3]), spec);
  o.result = {{"S", r.s},
              {"correlations",
               {{"ab", r.correlations[0]}, {"ab2", r.correlations[1]}, {"a2b", r.correlations[2]}, {"a2b2", r.correlations[3]}}},
              {"classical_bound", 2.0},
              {"quantum_bound", 2.0 * std::numbers::sqrt2}};
  o.rigor = "sampled";
}

void cmd_dichotomic(const Options& opt, Outcome& o) {
  const auto p = load_operator("projection", opt.projection, o);
  const auto spec = ensemble(opt, o, DensityState::basis(p.dim(), 0));
  const auto r = dichotomic_ensemble(p, spec);
  o.result = {{"frequency", r.frequency},
              {"target", r.target},
              {"bound", r.bound},
              {"deviation", std::abs(r.frequency - r.target)},
              {"runs", r.outcomes.size()},
              {"pass", r.pass}};
  o.rigor = "sampled";
  if (!r.pass) {
    o.property_ok = false;
    o.property = "frequency outside bound";
  }
  std::ostringstream csv;
  csv << "run_id,outcome\n";
  for (std::size_t n = 0; n < r.outcomes.size(); ++n) csv << n << "," << r.outcomes[n] << "\n";
  o.csv = csv.str();
}

void cmd_lueders(const Options& opt, Outcome& o) {
  const auto a = load_operator("op", opt.op, o);
  const auto b = load_operator("op-b", opt.op_b, o);
  const auto rho0 = load_state("state", opt.state, o);
  const auto u = load_condition("u-condition", opt.u_condition, o);
  const auto interval = load_interval(opt.interval, "interval");
  const auto r = lueders_experiment(a, interval, b, rho0, opt.delta, u, opt.eps, opt.k, opt.budget.get());
  o.result = {{"collapsed", io::to_json(r.collapsed)},
              {"target", r.target},
              {"b_range", io::to_json(r.b_range)},
              {"deviation", r.deviation},
              {"bound", r.bound},
              {"pass", r.pass},
              {"collimation", io::to_json(r.collimation)},
              {"cover", io::to_json(r.cover)}};
  o.rigor = "sampled";
  if (!r.pass) {
    o.property_ok = false;
    o.property = "deviation exceeds K (delta + 2 eps)";
  }
}

void cmd_slit(const Options& opt, Outcome& o) {
  const auto z = grid_position(opt.points, opt.lo, opt.hi);
  const auto center = opt.state.empty()
                          ? DensityState::pure(gaussian_superposition(opt.points, opt.lo, opt.hi, opt.centers, opt.width))
                          : load_state("state", opt.state, o);
  const auto w = Condition::ball(center, opt.radius);
  const auto r = double_slit_location(z, load_interval(opt.plus, "plus"), load_interval(opt.minus, "minus"), w, opt.eps,
                                      opt.budget.get());
  o.result = {{"located_union", r.located_union},
              {"located_plus", r.located_plus},
              {"located_minus", r.located_minus},
              {"inf_union", r.inf_union},
              {"inf_plus", r.inf_plus},
              {"inf_minus", r.inf_minus},
              {"plus_range", io::to_json(r.plus_range)},
              {"minus_range", io::to_json(r.minus_range)},
              {"z_range", io::to_json(r.z_range)}};
  o.rigor = "sampled";
}

using Command = void (*)(const Options&, Outcome&);

json echo_parameters(const CLI::App& sub) {
  json out = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string& name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_expected_max() <= 1 && res.size() == 1) out[name] = res.front();
      else out[name] = res;
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

// Subcommands share one Options, so per-command size defaults are applied
// after parsing.
struct SizeDefault {
  CLI::App* sub;
  std::size_t* target;
  std::size_t value;
};
using SizeDefaults = std::map<const CLI::Option*, SizeDefault>;

void add_budget(CLI::App* sub, Options& opt, SizeDefaults& size_defaults, std::size_t default_samples,
                bool seed_required) {
  opt.budget.samples = default_samples;
  size_defaults[sub->add_option("--samples,-n", opt.budget.samples, "Monte-Carlo samples")->check(CLI::PositiveNumber)] = {
      sub, &opt.budget.samples, default_samples};
  auto* seed = sub->add_option("--seed", opt.budget.seed, "Random seed");
  if (seed_required) seed->required();
  sub->add_option("--refine-steps", opt.budget.refine, "Local refinement steps for closed-form extremizers");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  SizeDefaults size_defaults;
  CLI::App app{"Numerical laboratory for qr-number sections over quantum state space", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Options opt;
  std::map<CLI::App*, Command> commands;
  std::map<CLI::App*, std::string> names;

  auto add = [&](const char* name, const char* help, Command cmd) {
    auto* sub = app.add_subcommand(name, help);
    sub->option_defaults()->always_capture_default();
    sub->add_option("--output,-o", opt.output, "Write the report here instead of standard output");
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    commands[sub] = cmd;
    names[sub] = name;
    return sub;
  };
  auto section_flags = [&](CLI::App* sub) {
    sub->add_option("--qr", opt.qr, "Section expression (JSON file or inline)");
    sub->add_option("--op", opt.op, "Operator (JSON file, inline JSON or builtin name)");
    sub->add_option("--condition", opt.condition, "Condition (JSON file or inline)");
  };

  {
    auto* sub = add("eval", "Evaluate a section at a state", cmd_eval);
    section_flags(sub);
    sub->add_option("--state", opt.state, "State (JSON file or inline)")->required();
  }
  {
    auto* sub = add("range", "Range of a section over its extent", cmd_range);
    section_flags(sub);
    add_budget(sub, opt, size_defaults, 256, true);
  }
  {
    auto* sub = add("collimate", "Sharp collimation, location and strictness", cmd_collimate);
    sub->add_option("--op", opt.op, "Operator")->required();
    sub->add_option("--condition", opt.condition, "Condition")->required();
    sub->add_option("--interval", opt.interval, "LO HI")->expected(2)->required();
    sub->add_option("--eps", opt.eps, "Accuracy in (0, 1)")->required();
    sub->add_flag("--strict", opt.strict, "Also check Tr|rho - P rho P| < eps");
    add_budget(sub, opt, size_defaults, 256, true);
  }
  {
    auto* sub = add("locate", "Truth value of 'value lies in I' over a ball basis", cmd_locate);
    section_flags(sub);
    sub->add_option("--interval", opt.interval, "LO HI")->expected(2)->required();
    sub->add_option("--poset", opt.poset, "Ball basis (JSON file or inline)")->required();
    add_budget(sub, opt, size_defaults, 256, true);
  }
  {
    auto* sub = add("heisenberg", "Uncertainty inequality under sharp collimation", cmd_heisenberg);
    sub->add_option("--op", opt.op, "Operator A")->required();
    sub->add_option("--op-b", opt.op_b, "Operator B")->required();
    sub->add_option("--condition", opt.condition, "Condition")->required();
    sub->add_option("--interval", opt.interval, "I_a: LO HI")->expected(2)->required();
    sub->add_option("--interval-b", opt.interval_b, "I_b: LO HI")->expected(2)->required();
    sub->add_option("--eps", opt.eps, "Accuracy in (0, 1)")->required();
    add_budget(sub, opt, size_defaults, 256, true);
  }
  {
    auto* sub = add("logic", "Heyting algebra of downsets of a poset", cmd_logic);
    sub->add_option("--poset", opt.poset, "Poset (JSON file or inline)")->required();
    sub->add_option("--check", opt.check, "lem, dne or laws")->check(CLI::IsMember({"lem", "dne", "laws"}));
  }
  {
    auto* sub = add("dynamics", "Hamilton flow of sampled values vs averaged quantum evolution", cmd_dynamics);
    sub->add_option("--potential", opt.potential, "free, harmonic or quartic");
    sub->add_option("--lambda", opt.lambda, "Quartic coupling");
    sub->add_option("--dim", opt.dim, "Truncation dimension (>= 16)");
    sub->add_option("--t-end", opt.t_end, "Final time");
    sub->add_option("--dt", opt.dt, "Grid step (<= 1e-2)");
    sub->add_option("--q0", opt.q0, "Coherent-state position");
    sub->add_option("--p0", opt.p0, "Coherent-state momentum");
    sub->add_option("--radius", opt.radius, "Ball radius around the coherent state");
    sub->add_option("--trajectories", opt.trajectories, "Also write trajectories as CSV here");
    add_budget(sub, opt, size_defaults, 20, true);
  }
  auto ensemble_flags = [&](CLI::App* sub, std::size_t default_count, const char* count_name) {
    opt.count = default_count;
    sub->add_option("--state", opt.state, "Epistemic center (JSON file or inline)");
    sub->add_option("--eps", opt.eps, "Epistemic radius")->required();
    size_defaults[sub->add_option(count_name, opt.count, "Ensemble size")->check(CLI::PositiveNumber)] = {
        sub, &opt.count, default_count};
    sub->add_option("--seed", opt.budget.seed, "Random seed")->required();
  };
  {
    auto* sub = add("bell", "Deterministic spin correlation over an ensemble of pairs", cmd_bell);
    sub->add_option("--uL", opt.u_left, "Left direction X Y Z")->expected(3)->required();
    sub->add_option("--uR", opt.u_right, "Right direction X Y Z")->expected(3)->required();
    ensemble_flags(sub, 1000, "--pairs");
    sub->add_option("--ontic-fraction", opt.ontic_fraction, "delta_n / eps");
    sub->add_option("--range-samples", opt.range_samples, "Samples per ontic ball");
  }
  {
    auto* sub = add("chsh", "CHSH combination of correlations (x-z plane angles)", cmd_chsh);
    opt.angles = {0.0, 90.0, 45.0, 135.0};
    sub->add_option("--angles", opt.angles, "a a' b b' in degrees")->expected(4);
    ensemble_flags(sub, 2000, "--pairs");
    sub->add_option("--ontic-fraction", opt.ontic_fraction, "delta_n / eps");
    sub->add_option("--range-samples", opt.range_samples, "Samples per ontic ball");
  }
  {
    auto* sub = add("dichotomic", "Outcome frequency of a yes/no measurement", cmd_dichotomic);
    sub->add_option("--projection", opt.projection, "Projection operator")->required();
    ensemble_flags(sub, 10000, "--runs");
  }
  {
    auto* sub = add("lueders", "Post-measurement values against P rho P / Tr(P rho)", cmd_lueders);
    sub->add_option("--op", opt.op, "Measured operator A")->required();
    sub->add_option("--interval", opt.interval, "I_a: LO HI")->expected(2)->required();
    sub->add_option("--op-b", opt.op_b, "Later operator B")->required();
    sub->add_option("--state", opt.state, "Prepared state rho0")->required();
    sub->add_option("--delta", opt.delta, "Radius of W around rho0")->required();
    sub->add_option("--u-condition", opt.u_condition, "Condition U after measurement")->required();
    sub->add_option("--eps", opt.eps, "Collimation accuracy")->required();
    sub->add_option("--k", opt.k, "Proportionality constant K");
    add_budget(sub, opt, size_defaults, 256, true);
  }
  {
    auto* sub = add("slit", "Location in two disjoint slits on a position grid", cmd_slit);
    opt.centers = {3.0, -3.0};
    opt.plus = {2.0, 4.0};
    opt.minus = {-4.0, -2.0};
    sub->add_option("--points", opt.points, "Grid points");
    sub->add_option("--lo", opt.lo, "Grid start");
    sub->add_option("--hi", opt.hi, "Grid end");
    sub->add_option("--centers", opt.centers, "Gaussian centers");
    sub->add_option("--width", opt.width, "Gaussian amplitude width");
    sub->add_option("--state", opt.state, "Explicit state instead of the Gaussian superposition");
    sub->add_option("--plus", opt.plus, "I_+: LO HI")->expected(2);
    sub->add_option("--minus", opt.minus, "I_-: LO HI")->expected(2);
    sub->add_option("--radius", opt.radius, "Ball radius around the state");
    sub->add_option("--eps", opt.eps, "Location accuracy")->required();
    add_budget(sub, opt, size_defaults, 32, true);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  for (const auto& [option, d] : size_defaults)
    if (d.sub == sub && option->count() == 0) *d.target = d.value;
  Outcome outcome;
  outcome.tolerances = base_tolerances();
  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  std::string status = "ok";
  std::string error;
  try {
    commands.at(sub)(opt, outcome);
    if (!outcome.property_ok) {
      code = kExitProperty;
      status = "property_violation";
    }
  } catch (const ValidationError& e) {
    code = kExitValidation;
    status = "validation_error";
    error = e.what();
  } catch (const NumericError& e) {
    code = kExitNumeric;
    status = "numeric_error";
    error = e.what();
  } catch (const Error& e) {
    code = kExitNumeric;
    status = "numeric_error";
    error = e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!error.empty()) err << kToolName << " " << names.at(sub) << ": " << error << "\n";
  if (!outcome.property_ok) err << kToolName << " " << names.at(sub) << ": " << outcome.property << "\n";

  std::string body;
  if (opt.format == "csv" && code != kExitValidation && code != kExitNumeric) {
    if (!outcome.csv) {
      err << kToolName << " " << names.at(sub) << ": csv output is available for dynamics, bell and dichotomic\n";
      return kExitValidation;
    }
    body = *outcome.csv;
  } else {
    json report = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                   {"command", names.at(sub)},
                   {"parameters", echo_parameters(*sub)},
                   {"inputs", outcome.inputs},
                   {"result", outcome.result},
                   {"tolerances", outcome.tolerances},
                   {"rigor", outcome.rigor},
                   {"status", status},
                   {"exit_code", code},
                   {"wall_clock_seconds", seconds}};
    if (!error.empty()) report["error"] = error;
    if (!outcome.property.empty()) report["property"] = outcome.property;
    body = report.dump(2) + "\n";
  }
  if (opt.output.empty()) {
    out << body;
  } else {
    std::ofstream f(opt.output);
    if (!f) {
      err << kToolName << ": cannot write '" << opt.output << "'\n";
      return kExitValidation;
    }
    f << body;
  }
  return code;
}

}  // namespace qrlab::cli
