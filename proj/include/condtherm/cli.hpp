#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condtherm/condtherm.hpp"
#include "condtherm/io.hpp"

namespace condtherm::cli {

using io::Json;

/// 0 success / convertible, 1 provably not convertible, 2 bad input, 3 internal or numeric failure.
enum Exit : int { kOk = 0, kNegative = 1, kInputError = 2, kInternalError = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotConvertible:
    case ErrorCode::NotThermoMajorizing:
    case ErrorCode::DegenerateSource:
      return kNegative;
    case ErrorCode::NumericBreakdown:
    case ErrorCode::DegenerateCertificate:
      return kInternalError;
    default:
      return kInputError;
  }
}

struct Options {
  std::string command;
  std::string file;
  std::string plan_file;
  std::string output;
  bool csv = false;
  bool raw = false;
  bool check = false;
  std::string which = "source";
  std::size_t column = 0;
  std::string grid;
  std::optional<std::string> policy;
  std::optional<double> eps;
  std::uint64_t seed = 0;
  std::size_t d = 2;
  std::size_t l = 1;
  std::size_t m = 1;
  bool rational = false;
  bool independent = false;
};

namespace detail {

inline Json load(const std::string& path, std::istream& in) {
  if (path == "-") return io::read_json(in, "<stdin>");
  std::ifstream file(path);
  if (!file) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
  return io::read_json(file, path);
}

inline NumericPolicy effective_policy(const Json& doc, const Options& opt) {
  NumericPolicy policy = io::read_policy(doc);
  if (opt.policy) policy.mode = *opt.policy == "rational" ? Mode::Rational : Mode::Float;
  if (opt.eps) {
    policy.eps_cmp = *opt.eps;
    policy.eps_lp = std::max(policy.eps_lp, *opt.eps);
    policy.eps_merge = std::min(policy.eps_merge, *opt.eps);
  }
  return policy;
}

template <class T>
double max_column_error(const CQState<T>& a, const CQState<T>& b) {
  if (a.branches() != b.branches()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t y = 0; y < a.branches(); ++y)
    worst = std::max(worst, max_abs_diff(a.column(y).values(), b.column(y).values()));
  return worst;
}

template <class T>
bool states_match(const CQState<T>& a, const CQState<T>& b, const NumericPolicy& policy) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return max_column_error(a, b) <= policy.eps_lp;
  }
}

template <class T>
Json decision_to_json(const Decision<T>& decision, bool with_multipliers) {
  Json out{{"convertible", decision.convertible}, {"grid", io::vector_to_json(decision.grid.s)}};
  if (decision.convertible) {
    out["R"] = io::matrix_to_json(*decision.plan_seed);
  } else {
    out["witness"] = io::matrix_to_json(decision.witness->a);
    out["omega"] = io::scalar_to_json(omega_functional(*decision.witness, decision.pq));
    if (with_multipliers) out["multipliers"] = io::vector_to_json(decision.certificate.ineq);
  }
  return out;
}

template <class T>
int run_typed(const Options& opt, const Json& doc, const NumericPolicy& policy, std::istream& in, std::ostream& out) {
  const std::string& cmd = opt.command;

  if (cmd == "check" || cmd == "witness") {
    auto inst = io::parse_instance<T>(doc, policy, true, true);
    const auto decision = check_cto(*inst.source, *inst.target, inst.context);
    out << decision_to_json(decision, cmd == "witness").dump() << '\n';
    return decision.convertible ? kOk : kNegative;
  }

  if (cmd == "pmin") {
    auto inst = io::parse_instance<T>(doc, policy, true, true);
    if (inst.source->branches() != 1 || inst.target->branches() != 1)
      fail(ErrorCode::ValidationError, "pmin needs single-column source and target");
    const auto& u = inst.source->column(0);
    const auto& v = inst.target->column(0);
    try {
      const T p = p_min(u, v, inst.context);
      out << Json{{"p_min", io::scalar_to_json(p)}, {"approx", to_double(p)}}.dump() << '\n';
      return kOk;
    } catch (const Error& e) {
      if (exit_code_for(e.code()) != kNegative) throw;
      out << Json{{"p_min", nullptr}, {"reason", std::string(to_string(e.code()))}}.dump() << '\n';
      return kNegative;
    }
  }

  if (cmd == "synth") {
    auto inst = io::parse_instance<T>(doc, policy, true, true);
    const auto decision = check_cto(*inst.source, *inst.target, inst.context);
    if (!decision.convertible) {
      out << decision_to_json(decision, false).dump() << '\n';
      return kNegative;
    }
    const auto plan = synthesize_cto(*inst.source, *inst.target, inst.context);
    const auto image = apply_cto(plan, *inst.source, inst.context);
    const double err = max_column_error(image, *inst.target);
    if (!states_match(image, *inst.target, inst.context.policy))
      fail(ErrorCode::NumericBreakdown, "synthesized plan misses the target by " + std::to_string(err));
    Json plan_json = io::plan_to_json(plan);
    if (opt.output.empty()) {
      out << plan_json.dump() << '\n';
    } else {
      std::ofstream file(opt.output);
      if (!file) fail(ErrorCode::ValidationError, "cannot write '" + opt.output + "'");
      file << plan_json.dump(2) << '\n';
      out << Json{{"convertible", true}, {"plan", opt.output}, {"max_error", err}}.dump() << '\n';
    }
    return kOk;
  }

  if (cmd == "apply") {
    auto inst = io::parse_instance<T>(doc, policy, true, opt.check);
    const Json plan_doc = load(opt.plan_file, in);
    const auto plan = io::plan_from_json<T>(plan_doc, inst.context.dim());
    validate_plan(plan, inst.context);
    const auto image = apply_cto(plan, *inst.source, inst.context);
    Json result = io::cq_to_json(image);
    if (!opt.check) {
      out << result.dump() << '\n';
      return kOk;
    }
    const bool match = states_match(image, *inst.target, inst.context.policy);
    result["matches"] = match;
    result["max_error"] = max_column_error(image, *inst.target);
    out << result.dump() << '\n';
    return match ? kOk : kNegative;
  }

  if (cmd == "rate") {
    auto inst = io::parse_instance<T>(doc, policy, true, true);
    const auto r = asymptotic_rate(*inst.source, *inst.target, inst.context, !opt.raw);
    Json result{{"f_source", r.f_source}, {"f_target", r.f_target}};
    switch (r.status) {
      case RateStatus::Finite:
        result["rate"] = r.rate;
        result["status"] = "finite";
        break;
      case RateStatus::FreeSource:
        result["rate"] = 0.0;
        result["status"] = "free_source";
        break;
      case RateStatus::FreeTarget:
        result["rate"] = nullptr;  // unbounded
        result["status"] = "free_target";
        break;
    }
    out << result.dump() << '\n';
    return kOk;
  }

  if (cmd == "lorenz") {
    const bool target = opt.which == "target";
    if (!target && opt.which != "source") fail(ErrorCode::ValidationError, "--which must be source or target");
    auto inst = io::parse_instance<T>(doc, policy, !target, target);
    const auto& state = target ? *inst.target : *inst.source;
    if (opt.column >= state.branches())
      fail(ErrorCode::ValidationError, "--column " + std::to_string(opt.column) + " out of range");
    const auto curve = build_lorenz(state.column(opt.column), inst.context);
    if (opt.csv) {
      out << "s,t\n";
      out.precision(17);
      for (const auto& [s, t] : curve.points()) out << to_double(s) << ',' << to_double(t) << '\n';
    } else {
      Json pts = Json::array();
      for (const auto& [s, t] : curve.points()) pts.push_back(Json::array({io::scalar_to_json(s), io::scalar_to_json(t)}));
      out << Json{{"points", std::move(pts)}}.dump() << '\n';
    }
    return kOk;
  }

  if (cmd == "monotone") {
    auto inst = io::parse_instance<T>(doc, policy, true, false);
    std::vector<T> grid;
    if (opt.grid.empty()) {
      grid = default_monotone_grid(inst.context);
    } else if (opt.grid == "sigma") {
      grid = sigma_grid(inst.context);
    } else if (opt.grid.rfind("uniform:", 0) == 0) {
      std::size_t n = 0;
      try {
        n = std::stoul(opt.grid.substr(8));
      } catch (const std::exception&) {
        fail(ErrorCode::ValidationError, "--grid uniform:N needs a positive integer");
      }
      if (n == 0) fail(ErrorCode::ValidationError, "--grid uniform:N needs a positive integer");
      grid = uniform_grid<T>(n);
    } else {
      fail(ErrorCode::ValidationError, "--grid must be sigma or uniform:N");
    }
    const auto src = phi_monotones(*inst.source, inst.context, grid);
    Json result{{"abscissae", io::vector_to_json(grid)},
                {"source", io::vector_to_json(src.phi)},
                {"free_energy", Json{{"source", src.free_energy}}}};
    if (inst.target) {
      const auto tgt = phi_monotones(*inst.target, inst.context, grid);
      result["target"] = io::vector_to_json(tgt.phi);
      result["free_energy"]["target"] = tgt.free_energy;
    }
    out << result.dump() << '\n';
    return kOk;
  }

  if (cmd == "embed") {
    auto inst = io::parse_instance<T>(doc, policy, true, false);
    std::vector<StateVector<T>> states;
    for (std::size_t x = 0; x < inst.source->branches(); ++x) states.push_back(inst.source->conditional(x));
    if (inst.target)
      for (std::size_t y = 0; y < inst.target->branches(); ++y) states.push_back(inst.target->conditional(y));
    const auto emb = embed_states(states, inst.context);
    Json st = Json::array();
    for (const auto& w : emb.states) st.push_back(io::vector_to_json(w.values()));
    out << Json{{"gibbs", io::vector_to_json(emb.context.gibbs)},
                {"energies", emb.context.energies},
                {"states", std::move(st)}}
               .dump()
        << '\n';
    return kOk;
  }

  fail(ErrorCode::ValidationError, "unknown command '" + cmd + "'");
}

}  // namespace detail

/// Runs one command. `args` excludes the program name. Payloads go to `out`,
/// diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Conditioned thermal operation convertibility toolkit", "condtherm"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--policy", opt.policy, "Arithmetic mode override")->check(CLI::IsMember({"float", "rational"}));
    sub->add_option("--eps", opt.eps, "Comparison tolerance override (float mode)");
  };
  auto with_file = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("file", opt.file, "Instance JSON ('-' for stdin)")->required();
    add_common(sub);
    return sub;
  };

  with_file("check", "Decide convertibility; prints R or a witness");
  with_file("pmin", "Threshold weight for (p u, (1 - p) g) -> v");
  with_file("witness", "Decide convertibility and print the dual witness");
  with_file("synth", "Synthesize a conversion plan")->add_option("-o,--output", opt.output, "Write the plan here");
  {
    auto* sub = app.add_subcommand("apply", "Apply a plan to the source state");
    sub->add_option("plan", opt.plan_file, "Plan JSON")->required();
    sub->add_option("file", opt.file, "Instance JSON ('-' for stdin)")->required();
    sub->add_flag("--check", opt.check, "Compare the result with the target; exit 1 on mismatch");
    add_common(sub);
  }
  with_file("rate", "Asymptotic conversion rate")->add_flag("--raw", opt.raw, "Use the literal free energy");
  {
    auto* sub = with_file("lorenz", "Emit Lorenz curve vertices");
    sub->add_flag("--csv", opt.csv, "CSV rows s,t");
    sub->add_option("--which", opt.which, "source or target");
    sub->add_option("--column", opt.column, "Branch index");
  }
  with_file("monotone", "Evaluate conditional monotones")->add_option("--grid", opt.grid, "sigma or uniform:N");
  with_file("embed", "Embed all branch conditionals on their common bend grid");
  {
    auto* sub = app.add_subcommand("random", "Emit a random instance");
    sub->add_option("--d", opt.d, "Levels")->check(CLI::Range(1, 12));
    sub->add_option("--l", opt.l, "Source branches")->check(CLI::Range(1, 16));
    sub->add_option("--m", opt.m, "Target branches")->check(CLI::Range(1, 16));
    sub->add_option("--seed", opt.seed, "Seed");
    sub->add_flag("--rational", opt.rational, "Exact rational instance");
    sub->add_flag("--independent", opt.independent, "Draw the target independently of the source");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  opt.command = app.get_subcommands().front()->get_name();

  try {
    if (opt.command == "random") {
      Json doc = opt.rational
                     ? io::instance_to_json(random_instance<Rational>(opt.d, opt.l, opt.m, opt.seed, !opt.independent))
                     : io::instance_to_json(random_instance<double>(opt.d, opt.l, opt.m, opt.seed, !opt.independent));
      out << doc.dump() << '\n';
      return kOk;
    }
    const Json doc = detail::load(opt.file, in);
    const NumericPolicy policy = detail::effective_policy(doc, opt);
    policy.validate();
    return policy.mode == Mode::Rational ? detail::run_typed<Rational>(opt, doc, policy, in, out)
                                         : detail::run_typed<double>(opt, doc, policy, in, out);
  } catch (const Error& e) {
    err << "condtherm " << opt.command << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    err << "condtherm " << opt.command << ": ValidationError: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "condtherm " << opt.command << ": internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace condtherm::cli
