#pragma once

// Command dispatch for the ntheta tool. Kept in a header so tests can run
// commands in-process and compare reports byte for byte.
//
// Exit statuses: 0 success, 2 precondition or input error, 3 failed internal
// check (a bug or a counterexample).

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ntheta/arcs.hpp"
#include "ntheta/curve.hpp"
#include "ntheta/errors.hpp"
#include "ntheta/expression.hpp"
#include "ntheta/family.hpp"
#include "ntheta/io/json.hpp"
#include "ntheta/local_model.hpp"
#include "ntheta/multiplicity.hpp"

namespace ntheta::cli {

using io::Json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitAssertion = 3;

/// Defaults, overridable through NTHETA_N / NTHETA_TMAX / NTHETA_TRUNC.
struct Defaults {
  int n = 16;
  int t_max = 10;
  int truncation = 24;

  static Defaults from_environment() {
    Defaults d;
    auto read = [](const char* name, int& slot) {
      if (const char* v = std::getenv(name)) {
        try {
          slot = std::stoi(v);
        } catch (const std::exception&) {
          throw PreconditionError("environment", std::string(name) + " is not an integer");
        }
      }
    };
    read("NTHETA_N", d.n);
    read("NTHETA_TMAX", d.t_max);
    read("NTHETA_TRUNC", d.truncation);
    return d;
  }
};

struct Options {
  std::string model;
  std::string f;
  std::string bind;
  std::string vars;
  std::vector<std::string> relations;
  std::vector<std::string> images;
  std::string arc_json;
  std::string curve;
  std::string sheaf;
  std::string family;
  std::string auxiliary;
  std::string golden_dir;
  std::string format = "json";
  bool minimal = false;
  bool through_z = false;
  bool cusp = false;
  int count = 100;
  int n = 16;
  int t_max = 10;
  int truncation = 24;
  std::uint64_t seed = 0;
};

namespace detail {

inline int truncation_for(const Options& o) { return std::max({o.truncation, o.n, o.t_max}); }

inline ModelElement model_element(const Options& o) {
  ntheta::detail::require(!o.model.empty(), "missing-model", "--model is required");
  ntheta::detail::require(!o.f.empty(), "missing-f", "--f is required");
  const LocalModel model = io::model_from_string(o.model);
  return reduce(model, parse_series(o.f, model.variables(), truncation_for(o), io::aliases_from_string(o.bind)));
}

inline RingSpec ring_spec_from(const Options& o, bool with_divisor) {
  ntheta::detail::require(!o.vars.empty(), "missing-vars", "--vars is required");
  RingSpec spec;
  spec.variables = io::split_list(o.vars);
  const auto aliases = io::aliases_from_string(o.bind);
  const int t = truncation_for(o);
  for (const auto& r : o.relations) spec.relations.push_back(parse_series(r, spec.variables, t, aliases));
  if (with_divisor && !o.f.empty()) spec.divisor = parse_series(o.f, spec.variables, t, aliases);
  return spec;
}

inline std::vector<PowerSeries> images_from(const Options& o, const std::vector<std::string>& variables) {
  const auto aliases = io::aliases_from_string(o.bind);
  if (!o.arc_json.empty()) {
    const Json j = io::load_json(o.arc_json);
    return io::arc_images_from_json(j, variables, j.contains("N") ? io::int_field(j, "N") : o.n, aliases);
  }
  Json j = {{"images", Json::object()}};
  for (const auto& item : o.images) {
    const auto eq = item.find('=');
    ntheta::detail::require(eq != std::string::npos, "image-syntax", "--image expects var=expr");
    j["images"][item.substr(0, eq)] = item.substr(eq + 1);
  }
  return io::arc_images_from_json(j, variables, o.n, aliases);
}

inline int arc_truncation(const Options& o) {
  if (!o.arc_json.empty()) {
    const Json j = io::load_json(o.arc_json);
    if (j.contains("N")) return io::int_field(j, "N");
  }
  return o.n;
}

inline std::pair<RationalNodalCurve, TFSheaf> curve_and_sheaf(const Options& o) {
  ntheta::detail::require(!o.curve.empty(), "missing-curve", "--curve is required");
  const Json cj = io::load_json(o.curve);
  RationalNodalCurve curve = io::curve_from_json(cj);
  Json sj;
  if (!o.sheaf.empty()) sj = io::load_json(o.sheaf);
  else if (cj.contains("sheaf")) sj = cj.at("sheaf");
  else throw PreconditionError("missing-sheaf", "--sheaf is required unless the curve JSON has a 'sheaf' entry");
  TFSheaf sheaf = io::sheaf_from_json(sj, curve);
  return {std::move(curve), std::move(sheaf)};
}

inline Json cmd_mult(const Options& o) {
  const ModelElement f = model_element(o);
  const BranchSum sum = mult_divisor_branchsum(f);
  const EqnmatCheck eq = check_eqnmat(f);
  const HilbertSamuelTable hs = hilbert_samuel(ring_spec(f), o.t_max);
  Json per_branch = Json::array(), branches = Json::array();
  for (const auto& b : sum.per_branch) {
    per_branch.push_back(*b.order);
    branches.push_back(b.branch.to_string());
  }
  if (!hs.stabilized || hs.multiplicity != sum.total)
    throw AssertionFailure("Hilbert-Samuel oracle disagrees with the branch sum");
  return {{"ord", eq.ord_d},
          {"mult_V", eq.mult_v},
          {"mult_D", sum.total},
          {"per_branch", per_branch},
          {"branches", branches},
          {"hs_table", io::hs_table_to_json(hs)},
          {"eqnmat", {{"holds", eq.holds}, {"equality", eq.equality}}}};
}

inline Json cmd_ord(const Options& o) {
  const ModelElement f = model_element(o);
  Json out = {{"normal_form", f.series().to_string()}, {"ord", io::order_to_json(ord_at_origin(f))}};
  if (!f.is_zero()) {
    const LeadingForm lf = leading_form(f.series());
    out["leading_form"] = lf.form.to_string();
    const BranchOrders bo = branch_orders(f);
    Json orders = Json::array();
    for (const auto& b : bo.entries) orders.push_back({{"branch", b.branch.to_string()}, {"order", io::order_to_json(b.order)}});
    out["branch_orders"] = orders;
    out["branch_vanishing"] = bo.any_vanishing;
  }
  return out;
}

inline Json cmd_arc(const Options& o) {
  if (!o.vars.empty()) {
    const RingSpec spec = ring_spec_from(o, false);
    ntheta::detail::require(!o.f.empty(), "missing-f", "--f is required");
    const PowerSeries f = parse_series(o.f, spec.variables, truncation_for(o), io::aliases_from_string(o.bind));
    const int n = arc_truncation(o);
    const GeneralArc arc = make_general_arc(spec, images_from(o, spec.variables), n);
    return {{"contact", io::order_to_json(arc_contact(arc, f).order)},
            {"ord", io::order_to_json(order_in_quotient(spec.variables, spec.relations, f))},
            {"images", io::arc_images_to_json(spec.variables, arc.images)},
            {"N", n}};
  }
  const ModelElement f = model_element(o);
  const auto names = f.model().variables();
  if (o.minimal) {
    const MinimalArc m = minimal_arc(f, o.n, o.seed);
    return {{"contact", m.contact}, {"ord", io::order_to_json(ord_at_origin(f))}, {"branch", m.branch.to_string()},
            {"images", io::arc_images_to_json(names, m.arc.images)}, {"N", o.n}};
  }
  if (o.through_z) {
    const ZArcSearch z = minimal_arc_through_z(f, o.n, o.seed);
    Json out = {{"found", z.found()}, {"ord", z.ord}, {"best_contact", io::order_to_json(z.best_contact)}, {"N", o.n}};
    if (z.arc) out["images"] = io::arc_images_to_json(names, z.arc->images);
    return out;
  }
  const int n = arc_truncation(o);
  const Arc arc = make_arc(f.model(), images_from(o, names), n);
  const Contact c = arc_contact(arc, f);
  return {{"contact", c.inside_divisor() ? Json("ArcInsideDivisor") : Json(*c.order)},
          {"ord", io::order_to_json(ord_at_origin(f))},
          {"images", io::arc_images_to_json(names, arc.images)},
          {"N", n}};
}

inline Json sample_report_to_json(const ArcSampleReport& r, const std::vector<std::string>& names) {
  Json hist = Json::object();
  for (const auto& [c, k] : r.histogram) hist[std::to_string(c)] = k;
  Json out = {{"requested", r.requested}, {"evaluated", r.evaluated}, {"inside_divisor", r.inside_divisor},
              {"ord", r.ord},             {"min_contact", io::order_to_json(r.min_contact)},
              {"violations", r.violations}, {"histogram", hist}};
  if (r.witness) out["witness"] = io::arc_images_to_json(names, *r.witness);
  return out;
}

inline Json cmd_arcs_sample(const Options& o) {
  if (o.cusp) {
    Options c = o;
    if (c.vars.empty()) c.vars = "x,y,z";
    if (c.relations.empty()) c.relations = {"y^2 - x^3"};
    if (c.f.empty()) c.f = "x - z^3";
    const RingSpec spec = ring_spec_from(c, false);
    ntheta::detail::require(spec.variables == std::vector<std::string>{"x", "y", "z"}, "cusp-variables",
                            "the cusp parametrization expects variables x,y,z");
    const PowerSeries f = parse_series(c.f, spec.variables, truncation_for(c), io::aliases_from_string(c.bind));
    return sample_report_to_json(sample_arcs_check(spec, f, cusp_parametrization(), c.count, c.n, c.seed),
                                 spec.variables);
  }
  const ModelElement f = model_element(o);
  return sample_report_to_json(sample_arcs_check(f, o.count, o.n, o.seed), f.model().variables());
}

inline Json cmd_hs(const Options& o) {
  const RingSpec spec = ring_spec_from(o, true);
  Json out = io::hs_table_to_json(hilbert_samuel(spec, o.t_max));
  out["t_max"] = o.t_max;
  if (spec.divisor) {
    RingSpec ambient = spec;
    ambient.divisor.reset();
    const HilbertSamuelTable v = hilbert_samuel(ambient, o.t_max);
    if (v.stabilized) {
      out["mult_V"] = v.multiplicity;
      out["dimension_V"] = v.dimension;
    }
    out["ord"] = io::order_to_json(order_in_quotient(spec.variables, spec.relations, *spec.divisor));
  }
  return out;
}

inline Json cmd_curve_h0(const Options& o) {
  const auto [curve, sheaf] = curve_and_sheaf(o);
  const Cohomology c = cohomology(curve, sheaf);
  return {{"g", curve.genus()}, {"degree", sheaf.total_degree()}, {"n", sheaf.n()},
          {"h0", c.h0},         {"h1", c.h1},                       {"chi", c.h0 - c.h1}};
}

inline Json cmd_theta(const Options& o) {
  const auto [curve, sheaf] = curve_and_sheaf(o);
  return io::theta_report_to_json(theta_invariants(curve, sheaf));
}

inline Json cmd_classify(const Options& o) {
  const auto [curve, sheaf] = curve_and_sheaf(o);
  return io::theta_class_to_json(classify_theta_point(curve, sheaf));
}

inline Json cmd_family(const Options& o) {
  const auto [curve, sheaf] = curve_and_sheaf(o);
  SheafFamily family;
  if (o.minimal) family = make_minimal_family(curve, sheaf, o.n, o.seed);
  else if (!o.family.empty()) family = io::family_from_json(io::load_json(o.family), curve, sheaf, o.n);
  else family = constant_family(curve, sheaf, o.n);
  std::optional<std::vector<Rational>> aux;
  if (!o.auxiliary.empty()) {
    aux.emplace();
    for (const auto& p : io::split_list(o.auxiliary)) aux->push_back(parse_rational(p));
  }
  Json out = io::family_cohomology_to_json(family_cohomology(curve, family, o.seed, aux));
  out["family"] = io::family_to_json(family);
  return out;
}

inline Json cmd_verify(const Options& o) {
  const auto [curve, sheaf] = curve_and_sheaf(o);
  Json out = io::theta_report_to_json(verify_theorem_A(curve, sheaf, o.n, o.seed));
  out["N"] = o.n;
  return out;
}

inline void print_table(const Json& j, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& [k, v] : j.items()) width = std::max(width, k.size());
  for (const auto& [k, v] : j.items())
    out << std::left << std::setw(static_cast<int>(width) + 2) << k << (v.is_string() ? v.get<std::string>() : v.dump())
        << "\n";
}

} // namespace detail

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

struct GoldenResult {
  int passed = 0;
  int failed = 0;
  Json failures = Json::array();
};

/// Runs every <name>.input.json ({"argv": [...]}) in `dir` and compares the
/// canonical JSON report with <name>.expected.json.
inline GoldenResult golden_suite(const std::string& dir) {
  namespace fs = std::filesystem;
  ntheta::detail::require(fs::is_directory(dir), "input-file", "'" + dir + "' is not a directory");
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 && name.ends_with(".input.json")) inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  GoldenResult result;
  for (const auto& input : inputs) {
    const std::string stem = input.filename().string().substr(0, input.filename().string().size() - 11);
    const Json case_json = io::load_json(input.string());
    const Json expected = io::load_json((input.parent_path() / (stem + ".expected.json")).string());
    std::ostringstream captured, errors;
    const int code = run(case_json.at("argv").get<std::vector<std::string>>(), captured, errors);
    Json actual;
    try {
      actual = Json::parse(captured.str());
    } catch (const Json::parse_error&) {
      actual = {{"exit", code}, {"stderr", errors.str()}};
    }
    if (code == 0 && actual.dump() == expected.dump()) {
      ++result.passed;
    } else {
      ++result.failed;
      result.failures.push_back({{"case", stem}, {"exit", code}, {"diff", Json::diff(expected, actual)}});
    }
  }
  return result;
}

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    const Defaults defaults = Defaults::from_environment();
    o.n = defaults.n;
    o.t_max = defaults.t_max;
    o.truncation = defaults.truncation;
  } catch (const PreconditionError& e) {
    err << "ntheta: precondition " << e.what() << "\n";
    return kExitPrecondition;
  }

  CLI::App app{"Local multiplicities and theta divisors of rational nodal curves"};
  app.require_subcommand(1);
  std::string chosen;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed (echoed in the report)");
    sub->add_option("--N", o.n, "Arc / family truncation");
    sub->add_option("--tmax", o.t_max, "Largest t for the Hilbert-Samuel table");
    sub->add_option("--trunc", o.truncation, "Truncation for parsed series");
    sub->add_option("--format", o.format, "json or table")->check(CLI::IsMember({"json", "table"}));
  };
  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "n=<nodes>,m=<smooth> or {\"n\":..,\"m\":..}");
    sub->add_option("--f", o.f, "Divisor equation");
    sub->add_option("--bind", o.bind, "Aliases, e.g. x=u1,y=v1,z=w1");
  };
  auto spec_opts = [&](CLI::App* sub) {
    sub->add_option("--vars", o.vars, "Comma-separated variables of an arbitrary ring");
    sub->add_option("--rel", o.relations, "Relation (repeatable)");
  };
  auto curve_opts = [&](CLI::App* sub) {
    sub->add_option("--curve", o.curve, "Curve JSON (file or inline)");
    sub->add_option("--sheaf", o.sheaf, "Sheaf JSON (file or inline)");
  };

  struct Entry {
    const char* name;
    const char* help;
    Json (*handler)(const Options&);
  };
  const std::vector<Entry> entries = {
      {"mult", "Order, branch-sum multiplicity and oracle table of a divisor on O_std", detail::cmd_mult},
      {"ord", "Order of vanishing and leading form", detail::cmd_ord},
      {"arc", "Contact order along an arc; --minimal / --through-z construct arcs", detail::cmd_arc},
      {"arcs-sample", "Sample random arcs and check contact >= ord", detail::cmd_arcs_sample},
      {"hs", "Hilbert-Samuel table of k[[vars]]/(rels, f)", detail::cmd_hs},
      {"curve-h0", "h0 and h1 of a torsion-free sheaf", detail::cmd_curve_h0},
      {"theta", "Theta invariants at a degree g-1 sheaf", detail::cmd_theta},
      {"classify", "Classify a point of theta", detail::cmd_classify},
      {"family", "Order of theta along a family of sheaves", detail::cmd_family},
      {"verify-A", "Check mult Theta = 2^n h0 two ways", detail::cmd_verify},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    common(sub);
    sub->callback([&chosen, name = std::string(e.name)] { chosen = name; });
    subs.push_back(sub);
  }
  for (auto* s : {subs[0], subs[1], subs[2], subs[3]}) model_opts(s);
  for (auto* s : {subs[2], subs[3], subs[4]}) spec_opts(s);
  subs[4]->add_option("--f", o.f, "Divisor equation");
  subs[4]->add_option("--bind", o.bind, "Aliases");
  subs[2]->add_option("--arc", o.arc_json, "Arc JSON (file or inline)");
  subs[2]->add_option("--image", o.images, "var=expr in t (repeatable)");
  subs[2]->add_flag("--minimal", o.minimal, "Construct an arc of minimal contact");
  subs[2]->add_flag("--through-z", o.through_z, "Search arcs through the locally trivial locus");
  subs[3]->add_option("--count", o.count, "Number of arcs");
  subs[3]->add_flag("--cusp", o.cusp, "Use the cusp parametrization x=s^2, y=s^3");
  for (auto* s : {subs[5], subs[6], subs[7], subs[8], subs[9]}) curve_opts(s);
  subs[8]->add_option("--family", o.family, "Family JSON (file or inline)");
  subs[8]->add_flag("--minimal", o.minimal, "Use the minimal family construction");
  subs[8]->add_option("--E", o.auxiliary, "Auxiliary points, comma-separated");

  CLI::App* golden = app.add_subcommand("golden", "Run a directory of golden cases");
  golden->add_option("dir", o.golden_dir, "Directory with *.input.json / *.expected.json")->required();
  golden->callback([&chosen] { chosen = "golden"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ntheta: precondition cli-usage: " << e.what() << "\n";
    return kExitPrecondition;
  }

  try {
    Json report;
    if (chosen == "golden") {
      const auto result = detail::golden_suite(o.golden_dir);
      report = {{"passed", result.passed}, {"failed", result.failed}, {"failures", result.failures}};
      out << report.dump(2) << "\n";
      return result.failed == 0 ? kExitOk : kExitAssertion;
    }
    for (const auto& e : entries)
      if (chosen == e.name) report = e.handler(o);
    report["seed"] = o.seed;
    if (o.format == "table") detail::print_table(report, out);
    else out << report.dump() << "\n";
    return kExitOk;
  } catch (const PreconditionError& e) {
    err << "ntheta: precondition " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const AssertionFailure& e) {
    err << "ntheta: CHECK FAILED: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const Json::exception& e) {
    err << "ntheta: precondition json-schema: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    err << "ntheta: internal error: " << e.what() << "\n";
    return kExitAssertion;
  }
}

} // namespace ntheta::cli
