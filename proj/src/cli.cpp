#include "dflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <CLI11.hpp>

#include "dflow/acceptance.hpp"
#include "dflow/flow.hpp"
#include "dflow/hardy.hpp"
#include "dflow/json_io.hpp"
#include "dflow/koenigs.hpp"

namespace dflow::cli {

namespace {

using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InputError(std::string(name) + " must be positive, got " + fmt_double(x));
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  const json j = io::read_json_file(path);
  if (!j.is_object()) throw io::ParseError(path.string() + ": config must be a JSON object");
  try {
    if (j.contains("command")) cfg.command = j["command"].get<std::string>();
    if (j.contains("truncation")) cfg.truncation = j["truncation"].get<std::size_t>();
    if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
    if (j.contains("t_end")) cfg.t_end = j["t_end"].get<double>();
    if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("input")) cfg.input = j["input"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("tolerance")) cfg.tolerance = j["tolerance"].get<double>();
    if (j.contains("filter")) cfg.filter = j["filter"].get<std::string>();
  } catch (const json::exception& e) {
    throw io::ParseError(path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& cfg, bool needs_input) {
  if (cfg.truncation && *cfg.truncation == 0) throw InputError("truncation must be positive");
  require_positive(cfg.dt, "dt");
  require_positive(cfg.t_end, "t-end");
  require_positive(cfg.sigma, "sigma");
  if (cfg.tolerance) require_positive(*cfg.tolerance, "tolerance");
  if (cfg.t_end < cfg.dt) throw InputError("t-end must be >= dt");
  if (needs_input) {
    if (cfg.input.empty()) throw InputError("--input is required for '" + cfg.command + "'");
    if (!std::filesystem::is_regular_file(cfg.input)) throw InputError("input file not found: " + cfg.input.string());
  }
  if (std::filesystem::exists(cfg.out) && !std::filesystem::is_directory(cfg.out)) {
    throw InputError("output path is not a directory: " + cfg.out.string());
  }
}

Series read_series(const RunConfig& cfg) {
  Series f = io::series_from_json(io::read_json_file(cfg.input));
  return cfg.truncation ? f.resized(*cfg.truncation) : f;
}

Generator make_generator(Series h) {
  try {
    return Generator(std::move(h));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { io::write_file_atomic(path, j.dump(2) + "\n"); }

const std::vector<cplx> kSamplePoints = {{1.0, 0.0}, {2.0, 0.0}, {1.0, 5.0}};

std::vector<cplx> abel_samples() {
  std::vector<cplx> out;
  for (double x : {1.0, 1.5, 2.0, 3.0}) {
    for (double y : {0.0, 2.0, -5.0, 10.0}) out.emplace_back(x, y);
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_flow(const RunConfig& cfg, std::ostream& out) {
  const Generator gen = make_generator(read_series(cfg));
  const FlowTrajectory flow = integrate_flow(gen, cfg.t_end, cfg.dt);

  std::string csv = "# seed=" + std::to_string(cfg.seed) + "\nt,n,re_a,im_a\n";
  for (const auto& st : flow.states) {
    for (std::size_t n = 1; n <= st.a.truncation(); ++n) {
      csv += fmt_double(st.t) + "," + std::to_string(n) + "," + fmt_double(st.a[n].real()) + "," +
             fmt_double(st.a[n].imag()) + "\n";
    }
  }
  const FlowState& last = flow.states.back();
  json samples = json::array();
  for (cplx s : kSamplePoints) samples.push_back({{"s", io::complex_to_json(s)}, {"phi_t", io::complex_to_json(last.eval(s))}});
  const json summary = {{"seed", cfg.seed},
                        {"truncation", gen.truncation()},
                        {"dt", cfg.dt},
                        {"t_end", last.t},
                        {"final_state", io::series_to_json(last.a)},
                        {"a1_pinning_residual", flow.pinning_residual},
                        {"dropped_tail", flow.dropped_tail},
                        {"samples", std::move(samples)}};
  io::write_file_atomic(cfg.out / "flow_trace.csv", csv);
  write_json(cfg.out / "flow_summary.json", summary);
  out << "flow: " << flow.states.size() << " states to t=" << last.t << ", Phi_t(1) = " << last.eval(1.0) << "\n";
  return kSuccess;
}

int cmd_koenigs(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Series h = read_series(cfg);
  KoenigsFunction k;
  try {
    k = koenigs_from_generator(h);
  } catch (const InversionError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  Dynamics dyn{};
  try {
    dyn = classify_dynamics(k);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  const Generator gen = make_generator(h);
  const FlowTrajectory flow = integrate_flow(gen, cfg.t_end, cfg.dt);
  const AbelReport abel = verify_abel(k, flow.states, abel_samples());
  const double tol = cfg.tolerance.value_or(1e-7);
  const bool passed = abel.max_algebraic_residual <= tol;

  const json report = {{"seed", cfg.seed},
                       {"koenigs", io::koenigs_to_json(k)},
                       {"classification", std::string(to_string(dyn))},
                       {"abel",
                        {{"max_algebraic_residual", abel.max_algebraic_residual},
                         {"max_pointwise_residual", abel.max_residual},
                         {"tolerance", tol},
                         {"passed", passed}}}};
  write_json(cfg.out / "koenigs.json", report);
  out << "koenigs: " << to_string(dyn) << ", Abel residual " << abel.max_algebraic_residual << (passed ? " <= " : " > ")
      << tol << "\n";
  return passed ? kSuccess : kNumericalFailure;
}

int cmd_matrix(const RunConfig& cfg, std::ostream& out) {
  const json input = io::read_json_file(cfg.input);
  Symbol sym;
  std::string source;
  if (input.is_object() && input.contains("characteristic")) {
    sym = io::symbol_from_json(input);
    if (cfg.truncation) sym.phi = sym.phi.resized(*cfg.truncation);
    source = "symbol";
  } else {
    Series h = io::series_from_json(input);
    if (cfg.truncation) h = h.resized(*cfg.truncation);
    const Generator gen = make_generator(std::move(h));
    sym = integrate_flow(gen, cfg.t_end, cfg.dt).states.back().symbol();
    source = "flow";
  }
  const std::size_t dim = cfg.truncation.value_or(sym.truncation());
  const OperatorMatrix mat = assemble_matrix(sym, dim);
  const double norm = compression_norm(mat);

  std::string csv = "# seed=" + std::to_string(cfg.seed) + "\nrow,col,re,im\n";
  for (std::size_t n = 1; n <= dim; ++n) {
    for (std::size_t m = 1; m <= dim; ++m) {
      csv += std::to_string(n) + "," + std::to_string(m) + "," + fmt_double(mat(n, m).real()) + "," +
             fmt_double(mat(n, m).imag()) + "\n";
    }
  }
  json summary = {{"seed", cfg.seed}, {"dimension", dim}, {"norm_estimate", norm}, {"source", source}};
  if (source == "flow") summary["t"] = cfg.t_end;
  io::write_file_atomic(cfg.out / "matrix.csv", csv);
  write_json(cfg.out / "matrix_summary.json", summary);
  out << "matrix: dimension " << dim << ", norm estimate " << fmt_double(norm) << "\n";
  return kSuccess;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  acceptance::Options opts;
  opts.seed = cfg.seed;
  opts.filter = cfg.filter;
  opts.tolerance = cfg.tolerance;
  const auto results = acceptance::run(opts);
  bool all = !results.empty();
  for (const auto& r : results) {
    out << acceptance::summary_line(r) << "\n";
    all = all && r.passed();
  }
  write_json(cfg.out / "verify_report.json", acceptance::report_json(results, opts));
  if (results.empty()) out << "verify: no criterion matches filter '" << cfg.filter << "'\n";
  return all ? kSuccess : kNumericalFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated Dirichlet series, semigroup flows and composition operators", "dflow"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, input, filter;
    std::size_t truncation = 0;
    double dt = 0, t_end = 0, sigma = 0, tolerance = 0;
    std::uint64_t seed = 0;
  } flags;
  struct Opts {
    CLI::Option *config, *out, *input, *filter, *truncation, *dt, *t_end, *sigma, *tolerance, *seed;
  };
  std::map<std::string, Opts> registered;

  const std::pair<const char*, const char*> commands[] = {
      {"flow", "Integrate the flow of a generator (series JSON) and write a CSV trace"},
      {"koenigs", "Build the Koenigs function of a generator and check the Abel equation"},
      {"matrix", "Assemble the composition-operator matrix of a symbol or of a flow at t-end"},
      {"verify", "Run the acceptance criteria and write a JSON report"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    Opts o{};
    o.config = sub->add_option("--config", flags.config, "JSON config file mirroring the run options");
    o.out = sub->add_option("--out", flags.out, "Output directory");
    o.input = sub->add_option("--input", flags.input, "Input JSON (series, or symbol for matrix)");
    o.truncation = sub->add_option("--truncation", flags.truncation, "Truncation N");
    o.dt = sub->add_option("--dt", flags.dt, "Time step");
    o.t_end = sub->add_option("--t-end", flags.t_end, "Final time");
    o.sigma = sub->add_option("--sigma", flags.sigma, "Half-plane offset for the Picard bound");
    o.seed = sub->add_option("--seed", flags.seed, "Random seed");
    o.filter = sub->add_option("--filter", flags.filter, "Acceptance section, name or id");
    o.tolerance = sub->add_option("--tolerance", flags.tolerance, "Tolerance override");
    registered[name] = o;
  }

  std::vector<std::string> argv_storage{"dflow"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  const Opts& o = registered.at(cfg.command);
  try {
    if (o.config->count()) {
      apply_config_file(cfg, flags.config);
      cfg.command = app.get_subcommands().front()->get_name();
    }
    if (o.out->count()) cfg.out = flags.out;
    if (o.input->count()) cfg.input = flags.input;
    if (o.truncation->count()) cfg.truncation = flags.truncation;
    if (o.dt->count()) cfg.dt = flags.dt;
    if (o.t_end->count()) cfg.t_end = flags.t_end;
    if (o.sigma->count()) cfg.sigma = flags.sigma;
    if (o.seed->count()) cfg.seed = flags.seed;
    if (o.filter->count()) cfg.filter = flags.filter;
    if (o.tolerance->count()) cfg.tolerance = flags.tolerance;
    validate(cfg, cfg.command != "verify");

    if (cfg.command == "flow") return cmd_flow(cfg, out);
    if (cfg.command == "koenigs") return cmd_koenigs(cfg, out, err);
    if (cfg.command == "matrix") return cmd_matrix(cfg, out);
    return cmd_verify(cfg, out);
  } catch (const io::ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace dflow::cli
