#include "banach/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "banach/certificate.hpp"
#include "banach/error.hpp"
#include "banach/expr.hpp"
#include "banach/shapes.hpp"
#include "banach/svg.hpp"

namespace banach::cli {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kCommands{"holes", "check", "reduce", "principal", "extend-row", "exp-reduce", "certify", "demo"};

[[noreturn]] void schema_error(const std::string& what) { fail(ErrorKind::ParseError, "manifest: " + what); }

void require_type(const Json& m, const char* key, bool ok, const char* type) {
  if (m.contains(key) && !ok) schema_error(std::string("'") + key + "' must be " + type);
}

struct Job {
  Json manifest;
  std::ostream& out;
  std::ostream& err;
  std::optional<fs::path> out_dir;
  Json artifacts = Json::array();

  std::string command() const { return manifest["command"].get<std::string>(); }
  bool svg() const { return manifest.value("format", "json") == "svg"; }

  std::optional<double> number(const char* key) const {
    if (!manifest.contains(key) || manifest[key].is_null()) return std::nullopt;
    return manifest[key].get<double>();
  }
  ReduceOptions options() const { return {number("eps"), number("tol")}; }

  Instance instance() const {
    const Json& inst = manifest.at("instance");
    const Field field = inst.value("field", "C") == "R" ? Field::Real : Field::Complex;
    return instance_from_shape(inst.at("shape").get<std::string>(), field, 1.0 / inst.value("resolution", 64.0));
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = *out_dir / name;
    std::ofstream file(path, std::ios::binary);
    file << content;
    if (!file) fail(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
    artifacts.push_back(path.string());
  }

  // Full document on stdout without an output directory, a summary otherwise.
  void emit(const std::string& name, const Json& document, Json summary) {
    if (!out_dir) {
      out << document.dump() << '\n';
      return;
    }
    write(name, document.dump() + "\n");
    summary["artifacts"] = artifacts;
    out << summary.dump(2) << '\n';
  }
};

Element source(const std::string& text, const Instance& owner) {
  if (!text.empty() && text[0] == '@') {
    std::ifstream in(text.substr(1));
    if (!in) fail(ErrorKind::ParseError, "cannot read function file '" + text.substr(1) + "'");
    try {
      return element_from_json(Json::parse(in), owner);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ParseError, "function file is not valid JSON: " + std::string(e.what()));
    }
  }
  return evaluate(*parse_expr(text), owner);
}

Tuple tuple_source(const Json& list, const Instance& owner) {
  std::vector<Element> coords;
  for (const auto& s : list) coords.push_back(source(s.get<std::string>(), owner));
  return Tuple(std::move(coords));
}

const RasterDomain& grid_of(const Instance& owner) {
  if (owner->kind() != AlgebraKind::GridFunction)
    fail(ErrorKind::ScopeError, "hole computations need a grid instance");
  return owner->domain();
}

double eps_of(const Job& job, const Element& g) { return job.number("eps").value_or(default_eps(g)); }
double tol_of(const Job& job, const Tuple& f, const Element& g) {
  return job.number("tol").value_or(default_tol(f.append(g)));
}

Json windings_json(const std::vector<HoleWinding>& ws) {
  Json out = Json::array();
  for (const auto& w : ws)
    out.push_back(Json{{"hole", w.hole}, {"contour_winding", w.contour_winding}, {"charge", w.charge}});
  return out;
}

int cmd_holes(Job& job) {
  const Instance owner = job.instance();
  const RasterDomain& k = grid_of(owner);
  SvgScene scene{k, std::nullopt, std::nullopt, {}, std::nullopt};
  Json doc{{"command", "holes"}};
  if (job.manifest.contains("g")) {
    const Element g = source(job.manifest["g"].get<std::string>(), owner);
    const double eps = eps_of(job, g);
    const RasterDomain z = sublevel_zero_set(g, eps);
    const auto hc = hole_condition(z, k);
    doc["target"] = "zero_set";
    doc["eps"] = eps;
    doc["report"] = to_json(hc, k);
    scene.zero_set = z;
    scene.holes = hc.report;
  } else {
    doc["target"] = "K";
    const HoleReport report = complement_components(k);
    doc["report"] = to_json(report, k);
    scene.holes = report;
  }
  if (job.manifest.contains("f") && !owner->is_real() && k.dim() == 2) {
    scene.windings = hole_windings(source(job.manifest["f"][0].get<std::string>(), owner), *scene.holes);
    doc["windings"] = windings_json(scene.windings);
  }
  if (job.out_dir) {
    job.write("holes.json", doc.dump() + "\n");
    job.write("holes.svg", render_svg(scene));
    job.out << Json{{"command", "holes"}, {"holes", scene.holes->holes.size()}, {"artifacts", job.artifacts}}.dump(2)
            << '\n';
  } else if (job.svg()) {
    job.out << render_svg(scene);
  } else {
    job.out << doc.dump() << '\n';
  }
  return kOk;
}

int cmd_check(Job& job) {
  const Instance owner = job.instance();
  const RasterDomain& k = grid_of(owner);
  const Element g = source(job.manifest.at("g").get<std::string>(), owner);
  const double eps = eps_of(job, g);
  const RasterDomain z = sublevel_zero_set(g, eps);
  const auto hc = hole_condition(z, k);
  const auto b1 = b1_falsify(g, eps);
  const Json cert = hole_condition_certificate(g, eps, hc, b1);
  const Json summary{{"command", "check"},
                     {"hole_condition", hc.holds},
                     {"boundary_principle", !b1.has_value()},
                     {"agreement", hc.holds == !b1.has_value()},
                     {"eps", eps}};
  if (job.svg() && !job.out_dir) {
    job.out << render_svg({k, z, hc.report, {}, b1});
  } else {
    if (job.out_dir) job.write("check.svg", render_svg({k, z, hc.report, {}, b1}));
    job.emit("check.json", cert, summary);
  }
  return hc.holds ? kOk : kObstruction;
}

int finish_obstruction(Job& job, const std::string& decision, const Tuple& f, const Element& g,
                       const ObstructionReport& report, const std::string& file) {
  const Json cert = obstruction_certificate(decision, f, g, eps_of(job, g), tol_of(job, f, g), report);
  job.emit(file, cert, Json{{"command", job.command()}, {"status", "obstruction"}, {"obstruction", to_json(report)}});
  return kObstruction;
}

int cmd_reduce(Job& job) {
  const Instance owner = job.instance();
  const Tuple f = tuple_source(job.manifest.at("f"), owner);
  const Element g = source(job.manifest.at("g").get<std::string>(), owner);
  const auto r = reduce_tuple(f, g, job.options());
  if (const auto* rep = std::get_if<ObstructionReport>(&r)) return finish_obstruction(job, "reduce", f, g, *rep, "reduce.json");
  const auto& w = std::get<ReductionWitness>(r);
  const Json cert = reduction_certificate(f, g, w, tol_of(job, f, g));
  job.emit("reduce.json", cert,
           Json{{"command", "reduce"}, {"status", "witness"}, {"achieved_min", w.achieved_min}, {"eps", w.eps}});
  return kOk;
}

int cmd_principal(Job& job) {
  const Instance owner = job.instance();
  const Tuple f = tuple_source(job.manifest.at("f"), owner);
  const Element g = source(job.manifest.at("g").get<std::string>(), owner);
  const auto p = reduce_to_principal(f, g, job.options());
  if (const auto* rep = std::get_if<ObstructionReport>(&p))
    return finish_obstruction(job, "principal", f, g, *rep, "principal.json");
  const auto& w = std::get<PrincipalWitness>(p);
  const Json cert = principal_certificate(f, g, w, tol_of(job, f, g));
  job.emit("principal.json", cert,
           Json{{"command", "principal"}, {"status", "witness"}, {"residuals", cert["residuals"]}});
  return kOk;
}

int cmd_extend_row(Job& job) {
  const Instance owner = job.instance();
  const Tuple f = tuple_source(job.manifest.at("f"), owner);
  const Element g = source(job.manifest.at("g").get<std::string>(), owner);
  const auto r = reduce_tuple(f, g, job.options());
  if (const auto* rep = std::get_if<ObstructionReport>(&r))
    return finish_obstruction(job, "reduce", f, g, *rep, "extend_row.json");
  const auto& w = std::get<ReductionWitness>(r);
  const Tuple u = f.append(g);
  const RowExtension ext = extend_row(u, w);
  const Json cert = row_extension_certificate(u, w.a, ext, tol_of(job, f, g));
  job.emit("extend_row.json", cert,
           Json{{"command", "extend-row"}, {"status", "witness"}, {"factors", ext.W.logs.size()},
                {"residuals", cert["residuals"]}});
  return kOk;
}

int cmd_exp_reduce(Job& job) {
  const Instance owner = job.instance();
  const Tuple a = tuple_source(job.manifest.at("f"), owner);
  const Element g = source(job.manifest.at("g").get<std::string>(), owner);
  try {
    const auto w = exp_reduce_pair_bsr1(a[0], g, job.options());
    const Json cert = exp_reducibility_certificate(a, g, w, tol_of(job, a, g));
    job.emit("exp_reduce.json", cert,
             Json{{"command", "exp-reduce"}, {"status", "witness"}, {"residuals", cert["residuals"]}});
    return kOk;
  } catch (const ObstructionError& e) {
    Json doc{{"command", "exp-reduce"},
             {"status", "obstruction"},
             {"kind", std::string(to_string(e.kind()))},
             {"message", e.what()},
             {"obstruction", to_json(e.report())}};
    job.emit("exp_reduce.json", doc, doc);
    return kObstruction;
  }
}

int cmd_certify(Job& job) {
  const std::string path = job.manifest.at("certificate").get<std::string>();
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot read certificate '" + path + "'");
  Json cert;
  try {
    cert = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, "certificate is not valid JSON: " + std::string(e.what()));
  }
  const CertifyResult r = certify(cert);
  const Json doc{{"command", "certify"},
                 {"claim", cert.value("claim", "")},
                 {"accepted", r.accepted},
                 {"hash_ok", r.hash_ok},
                 {"checks_ok", r.checks_ok},
                 {"residuals", r.residuals},
                 {"failures", r.failures}};
  job.out << doc.dump(2) << '\n';
  if (r.accepted) return kOk;
  job.err << Error(ErrorKind::InvalidWitness, "certificate rejected", Json{{"failures", r.failures}}).to_json().dump()
          << '\n';
  return kError;
}

Json demo_manifest(const Json& m, const std::string& shape, const std::string& f, const std::string& g) {
  Json sub = m;
  sub["instance"] = Json{{"shape", shape}, {"field", "C"}, {"resolution", m.contains("instance") ? m["instance"].value("resolution", 64.0) : 64.0}};
  sub["f"] = Json::array({f});
  sub["g"] = g;
  sub.erase("demo");
  sub["format"] = "json";
  return sub;
}

int cmd_demo(Job& job) {
  const std::string name = job.manifest.at("demo").get<std::string>();
  if (!job.out_dir) job.out_dir = fs::path("demo_" + name);
  fs::create_directories(*job.out_dir);
  Json steps = Json::array();
  auto step = [&](const std::string& command, const Json& base, const std::string& file) {
    Json m = base;
    m["command"] = command;
    std::ostringstream doc;
    Job capture{m, doc, job.err, std::nullopt};
    int code = kOk;
    if (command == "holes") code = cmd_holes(capture);
    else if (command == "check") code = cmd_check(capture);
    else if (command == "reduce") code = cmd_reduce(capture);
    else if (command == "principal") code = cmd_principal(capture);
    else code = cmd_exp_reduce(capture);
    job.write(file, doc.str());
    Json summary = Json::parse(doc.str());
    Json entry{{"step", command}, {"exit", code}, {"file", (*job.out_dir / file).string()}};
    if (summary.contains("obstruction")) entry["obstruction"] = summary["obstruction"];
    if (summary.contains("decision") && summary["decision"].is_object()) entry["hole_condition"] = summary["decision"]["holds"];
    if (summary.contains("residuals")) entry["residuals"] = summary["residuals"];
    steps.push_back(std::move(entry));
    return code;
  };
  if (name == "annulus" || name == "disk") {
    const bool ann = name == "annulus";
    const Json base = demo_manifest(job.manifest, ann ? "annulus(1,2)" : "disk(2)", "z", ann ? "abs(z)-1.5" : "abs(z)-1");
    {
      Json m = base;
      m["command"] = "holes";
      std::ostringstream svg;
      m["format"] = "svg";
      Job s{m, svg, job.err, std::nullopt};
      cmd_holes(s);
      job.write("holes.svg", svg.str());
    }
    step("holes", base, "holes.json");
    step("check", base, "check.json");
    step("reduce", base, "reduce.json");
    step("principal", base, "principal.json");
    if (ann) {
      Json e = base;
      e["f"] = Json::array({"exp(abs(z))"});
      step("principal", e, "principal_exp.json");
    }
  } else {
    Json base = demo_manifest(job.manifest, "circle(1024)", "exp(i*theta)", "re(z)");
    step("reduce", base, "reduce.json");
    step("principal", base, "principal.json");
    Json zero = base;
    zero["g"] = "0";
    step("principal", zero, "principal_g0.json");
    step("exp-reduce", zero, "exp_reduce.json");
  }
  job.out << Json{{"command", "demo"}, {"demo", name}, {"steps", steps}, {"artifacts", job.artifacts}}.dump(2) << '\n';
  return kOk;
}

}  // namespace

void validate_manifest(const Json& m) {
  if (!m.is_object()) schema_error("must be a JSON object");
  static const std::set<std::string> kKeys{"version", "command", "instance", "f", "g", "eps", "tol",
                                           "out_dir", "format", "certificate", "demo"};
  for (const auto& [key, value] : m.items())
    if (!kKeys.count(key)) schema_error("unknown key '" + key + "'");
  if (m.value("version", "") != "v1") schema_error("'version' must be \"v1\"");
  if (!m.contains("command") || !m["command"].is_string() || !kCommands.count(m["command"].get<std::string>()))
    schema_error("'command' must be one of holes, check, reduce, principal, extend-row, exp-reduce, certify, demo");
  const std::string cmd = m["command"].get<std::string>();

  if (m.contains("instance")) {
    const Json& inst = m["instance"];
    if (!inst.is_object()) schema_error("'instance' must be an object");
    for (const auto& [key, value] : inst.items())
      if (key != "shape" && key != "field" && key != "resolution") schema_error("unknown instance key '" + key + "'");
    if (!inst.contains("shape") || !inst["shape"].is_string()) schema_error("'instance.shape' must be a string");
    if (inst.contains("field") && inst["field"] != "R" && inst["field"] != "C")
      schema_error("'instance.field' must be \"R\" or \"C\"");
    if (inst.contains("resolution") && !(inst["resolution"].is_number() && inst["resolution"].get<double>() > 0))
      schema_error("'instance.resolution' must be a positive number");
  }
  bool strings = m.contains("f") && m["f"].is_array();
  if (strings)
    for (const auto& s : m["f"]) strings = strings && s.is_string();
  require_type(m, "f", strings && !m["f"].empty(), "a nonempty array of strings");
  require_type(m, "g", m.contains("g") && m["g"].is_string(), "a string");
  for (const char* key : {"eps", "tol"})
    require_type(m, key, m.contains(key) && (m[key].is_null() || (m[key].is_number() && m[key].get<double>() > 0)),
                 "a positive number or null");
  require_type(m, "out_dir", m.contains("out_dir") && m["out_dir"].is_string(), "a string");
  require_type(m, "format", m.contains("format") && (m["format"] == "json" || m["format"] == "svg"),
               "\"json\" or \"svg\"");
  require_type(m, "certificate", m.contains("certificate") && m["certificate"].is_string(), "a string");
  require_type(m, "demo", m.contains("demo") && (m["demo"] == "annulus" || m["demo"] == "disk" || m["demo"] == "circle"),
               "one of annulus, disk, circle");

  auto need = [&](const char* key) {
    if (!m.contains(key)) schema_error("'" + cmd + "' needs '" + key + "'");
  };
  if (cmd == "certify") need("certificate");
  else if (cmd == "demo") need("demo");
  else need("instance");
  if (cmd == "check" || cmd == "reduce" || cmd == "principal" || cmd == "extend-row" || cmd == "exp-reduce") need("g");
  if (cmd == "reduce" || cmd == "principal" || cmd == "extend-row" || cmd == "exp-reduce") need("f");
  if (cmd == "exp-reduce" && m["f"].size() != 1) schema_error("'exp-reduce' takes exactly one function");
  if (m.value("format", "json") == "svg" && cmd != "holes" && cmd != "check")
    schema_error("svg output is available for holes and check only");
}

int run_manifest(const Json& manifest, std::ostream& out, std::ostream& err) {
  try {
    validate_manifest(manifest);
    Job job{manifest, out, err, std::nullopt};
    if (manifest.contains("out_dir")) {
      job.out_dir = fs::path(manifest["out_dir"].get<std::string>());
      fs::create_directories(*job.out_dir);
      if (manifest["command"] != "demo") job.write("manifest.json", manifest.dump(2) + "\n");
    }
    const std::string cmd = job.command();
    if (cmd == "holes") return cmd_holes(job);
    if (cmd == "check") return cmd_check(job);
    if (cmd == "reduce") return cmd_reduce(job);
    if (cmd == "principal") return cmd_principal(job);
    if (cmd == "extend-row") return cmd_extend_row(job);
    if (cmd == "exp-reduce") return cmd_exp_reduce(job);
    if (cmd == "certify") return cmd_certify(job);
    return cmd_demo(job);
  } catch (const ObstructionError& e) {
    out << Json{{"command", manifest.value("command", "")}, {"status", "obstruction"}, {"obstruction", to_json(e.report())}}
               .dump()
        << '\n';
    err << e.to_json().dump() << '\n';
    return kObstruction;
  } catch (const Error& e) {
    err << e.to_json().dump() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << Json{{"error", "InvalidArgument"}, {"message", e.what()}}.dump() << '\n';
    return kError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reducibility decisions and witness certificates for invertible tuples over function algebras",
               "banach_reduce"};
  app.require_subcommand(1);

  struct Flags {
    std::string shape, field = "C", out_dir, format = "json", g, positional;
    double resolution = 64.0;
    std::optional<double> eps, tol;
    std::vector<std::string> f;
  } flags;

  auto common = [&](CLI::App* sub, bool functions) {
    sub->add_option("--shape", flags.shape, "instance shape, e.g. annulus(1,2) or circle(1024)");
    sub->add_option("--field", flags.field, "scalar field")->check(CLI::IsMember({"R", "C"}));
    sub->add_option("--resolution", flags.resolution, "grid cells per unit length")->check(CLI::PositiveNumber);
    sub->add_option("--eps", flags.eps, "zero-set threshold for g");
    sub->add_option("--tol", flags.tol, "invertibility tolerance");
    sub->add_option("--out-dir", flags.out_dir, "directory for artifacts");
    sub->add_option("--format", flags.format, "stdout format")->check(CLI::IsMember({"json", "svg"}));
    sub->add_option("-g", flags.g, "expression or @file for g");
    if (functions) sub->add_option("-f", flags.f, "expression or @file for a coordinate of f (repeatable)");
  };
  for (const char* name : {"holes", "check"}) common(app.add_subcommand(name, ""), true);
  app.get_subcommand("holes")->description("label the holes of K, or of the eps-zero set of g when -g is given");
  app.get_subcommand("check")->description("decide the hole condition and the boundary principle for g");
  for (const auto& [name, what] : std::vector<std::pair<const char*, const char*>>{
           {"reduce", "search a with f + a g invertible"},
           {"principal", "search a with f + a g in the principal component"},
           {"extend-row", "complete (f, g) to a determinant-one exponential product"},
           {"exp-reduce", "exponential reducibility witness for a pair (a, g)"}})
    common(app.add_subcommand(name, what), true);
  auto* certify_cmd = app.add_subcommand("certify", "re-verify a certificate file");
  certify_cmd->add_option("file", flags.positional, "certificate path")->required();
  auto* demo_cmd = app.add_subcommand("demo", "run the annulus, disk or circle pipeline");
  demo_cmd->add_option("name", flags.positional, "demo name")->required()->check(CLI::IsMember({"annulus", "disk", "circle"}));
  demo_cmd->add_option("--resolution", flags.resolution, "grid cells per unit length")->check(CLI::PositiveNumber);
  demo_cmd->add_option("--out-dir", flags.out_dir, "directory for artifacts");
  auto* run_cmd = app.add_subcommand("run", "execute a v1 job manifest");
  run_cmd->add_option("manifest", flags.positional, "manifest path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << Json{{"error", "ParseError"}, {"message", e.what()}}.dump() << '\n';
    return kError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "run") {
    std::ifstream in(flags.positional);
    if (!in) {
      err << Error(ErrorKind::ParseError, "cannot read manifest '" + flags.positional + "'").to_json().dump() << '\n';
      return kError;
    }
    Json m;
    try {
      m = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      err << Error(ErrorKind::ParseError, std::string("manifest is not valid JSON: ") + e.what()).to_json().dump()
          << '\n';
      return kError;
    }
    return run_manifest(m, out, err);
  }

  Json m{{"version", "v1"}, {"command", cmd}};
  if (cmd == "certify") {
    m["certificate"] = flags.positional;
  } else if (cmd == "demo") {
    m["demo"] = flags.positional;
    m["instance"] = Json{{"shape", "demo"}, {"resolution", flags.resolution}};
  } else {
    if (flags.shape.empty()) {
      err << Error(ErrorKind::ParseError, "--shape is required").to_json().dump() << '\n';
      return kError;
    }
    m["instance"] = Json{{"shape", flags.shape}, {"field", flags.field}, {"resolution", flags.resolution}};
    if (!flags.f.empty()) m["f"] = flags.f;
    if (!flags.g.empty()) m["g"] = flags.g;
    if (flags.eps) m["eps"] = *flags.eps;
    if (flags.tol) m["tol"] = *flags.tol;
    m["format"] = flags.format;
  }
  if (!flags.out_dir.empty()) m["out_dir"] = flags.out_dir;
  return run_manifest(m, out, err);
}

}  // namespace banach::cli
