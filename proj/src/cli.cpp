#include "tensorlight/cli.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "tensorlight/error.hpp"
#include "tensorlight/io.hpp"
#include "tensorlight/runfile.hpp"
#include "tensorlight/version.hpp"

namespace tl {

using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string micrometres(double v) { return g17(v) + " um"; }

std::vector<double> split_numbers(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> out;
  std::string cell;
  std::istringstream is(text);
  while (std::getline(is, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError(flag + ": '" + cell + "' is not a number");
    }
  }
  if (out.size() != count) throw ConfigError(flag + ": expected " + std::to_string(count) + " comma-separated numbers");
  return out;
}

json complex_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

/// Flags shared by every subcommand that evaluates a beam.
struct BeamOptions {
  std::string beam;
  int sigma = 1;
  double waist_um = 1.0;
  double wavelength_um = 0.729;
  std::string backend = "auto";

  void add(CLI::App& app) {
    app.add_option("--beam", beam, "gauss | hg:m,n | lg:l,p | radial | azimuthal")->required();
    app.add_option("--sigma", sigma, "polarization sigma of LG/HG/Gaussian beams")->check(CLI::Range(-1, 1));
    app.add_option("--waist", waist_um, "beam waist w0 in micrometres");
    app.add_option("--wavelength", wavelength_um, "wavelength in micrometres");
    app.add_option("--backend", backend, "derivatives: auto | analytic | fd");
  }

  json document() const {
    json b;
    const auto colon = beam.find(':');
    const std::string type = beam.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : beam.substr(colon + 1);
    if (type == "gauss" || type == "radial" || type == "azimuthal") {
      if (!args.empty()) throw ConfigError("--beam: '" + type + "' takes no indices");
      b["type"] = type;
    } else if (type == "lg" || type == "hg") {
      const auto idx = split_numbers(args, 2, "--beam");
      for (double v : idx)
        if (v != static_cast<int>(v)) throw ConfigError("--beam: mode indices must be integers");
      b["type"] = type;
      b[type == "lg" ? "l" : "m"] = static_cast<int>(idx[0]);
      b[type == "lg" ? "p" : "n"] = static_cast<int>(idx[1]);
    } else {
      throw ConfigError("--beam: unknown beam '" + beam + "' (gauss, hg:m,n, lg:l,p, radial, azimuthal)");
    }
    if (type != "radial" && type != "azimuthal") b["sigma"] = sigma;
    b["waist"] = micrometres(waist_um);
    b["wavelength"] = micrometres(wavelength_um);
    return b;
  }
};

struct GridOptions {
  std::optional<double> half_width_um;
  int resolution = 256;
  double z_um = 0.0;

  void add(CLI::App& app) {
    app.add_option("--half-width", half_width_um, "half width of the square grid in micrometres (default 2 w0)");
    app.add_option("--resolution", resolution, "nodes per axis");
    app.add_option("--z", z_um, "focal-plane offset in micrometres");
  }

  json document(double waist_um) const {
    return {{"half_width", micrometres(half_width_um.value_or(2.0 * waist_um))},
            {"resolution", resolution},
            {"z", micrometres(z_um)}};
  }
};

struct TransitionOptions {
  std::string j1 = "1/2";
  std::string m1 = "1/2";
  std::string j2 = "5/2";
  std::string m2;
  std::string multipole = "E2_dJ2";
  double theta_deg = 0.0;
  std::string axis = "0,1,0";

  void add(CLI::App& app, const char* m2_help) {
    app.add_option("--J1", j1, "initial total angular momentum");
    app.add_option("--m1", m1, "initial projection");
    app.add_option("--J2", j2, "final total angular momentum");
    app.add_option("--m2", m2, m2_help);
    app.add_option("--multipole", multipole, "E1 | E2_dJ1 | E2_dJ2");
    app.add_option("--theta", theta_deg, "quantization-axis rotation in degrees");
    app.add_option("--axis", axis, "rotation axis x,y,z (unit vector)");
  }

  json transition() const { return {{"J1", j1}, {"m1", m1}, {"J2", j2}, {"multipole", multipole}}; }
  json geometry() const {
    const auto a = split_numbers(axis, 3, "--axis");
    return {{"theta", g17(theta_deg) + " deg"}, {"axis", a}};
  }
  int rank() const { return multipole == "E2_dJ2" ? 2 : 1; }

  /// m2 values reachable from m1 within the multipole rank and |m2| <= J2.
  std::vector<std::string> final_projections(bool whole_manifold) const {
    if (!m2.empty()) return {m2};
    HalfInt jj2, mm1;
    try {
      jj2 = HalfInt::parse(j2);
      mm1 = HalfInt::parse(m1);
    } catch (const std::invalid_argument&) {
      throw ConfigError("--J2/--m1: expected integers or half-integers such as 5/2");
    }
    std::vector<std::string> out;
    for (int t = -jj2.twice(); t <= jj2.twice(); t += 2) {
      const HalfInt m = HalfInt::from_twice(t);
      if (whole_manifold || abs(m - mm1) <= HalfInt(rank())) out.push_back(m.to_string());
    }
    return out;
  }
};

struct TrapOptions {
  double mass_u = 40.0;
  std::string frequencies_mhz = "1,1,1";

  void add(CLI::App& app) {
    app.add_option("--mass", mass_u, "atomic mass in u");
    app.add_option("--trap-freq", frequencies_mhz, "trap frequencies X,Y,Z in MHz (omega / 2 pi)");
  }

  json document() const {
    const auto f = split_numbers(frequencies_mhz, 3, "--trap-freq");
    return {{"mass", g17(mass_u) + " u"},
            {"frequencies", {g17(f[0]) + " MHz", g17(f[1]) + " MHz", g17(f[2]) + " MHz"}}};
  }
};

struct OutputOptions {
  std::string out = ".";
  std::string name;
  bool keep_complex = false;
  unsigned threads = 0;

  void add(CLI::App& app, const char* default_name) {
    name = default_name;
    app.add_option("--out", out, "output directory");
    app.add_option("--name", name, "file name prefix");
    app.add_flag("--keep-complex", keep_complex, "also write real and imaginary parts");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
  }

  void fill(json& doc) const {
    doc["name"] = name;
    doc["output_dir"] = out;
    doc["keep_complex"] = keep_complex;
    if (threads != 0) doc["threads"] = threads;
  }
};

void report(const std::vector<RunOutput>& outputs, std::ostream& out) {
  for (const auto& r : outputs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", r.map.scale_factor);
    out << r.csv.string() << "  scale_factor=" << buf << "\n";
  }
}

std::vector<RunOutput> run_document(const json& doc, const std::optional<std::string>& out_dir, std::ostream& out) {
  const RunPlan plan = parse_run(doc);
  std::optional<std::filesystem::path> dir;
  if (out_dir) dir = *out_dir;
  auto outputs = execute_run(plan, dir);
  report(outputs, out);
  return outputs;
}

json point_record(const BeamOptions& beam_opts, const TransitionOptions& t_opts, const std::string& at,
                  const std::optional<TrapOptions>& trap_opts, int n, const std::string& branch_name) {
  const BeamSpec beam = parse_beam(beam_opts.document(), "--beam");
  const DiffBackend backend = parse_backend(beam_opts.backend, "--backend");
  const auto p = split_numbers(at, 3, "--at");
  const Vec3 r{p[0] * 1e-6, p[1] * 1e-6, p[2] * 1e-6};
  const FieldSample s = sample_field(beam, r, 2, backend);
  const FieldComponents c = field_components(s.E);

  json rec;
  rec["position_um"] = p;
  rec["beam"] = beam_opts.document();
  rec["E"] = {complex_json(s.E[0]), complex_json(s.E[1]), complex_json(s.E[2])};
  rec["components"] = {{"Ez", complex_json(c.longitudinal)},
                       {"Esigma+", complex_json(c.sigma_plus)},
                       {"Esigma-", complex_json(c.sigma_minus)}};
  json jac = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int j = 0; j < 3; ++j) row.push_back(complex_json(s.jacobian[i][j]));
    jac.push_back(row);
  }
  rec["jacobian"] = jac;
  rec["jacobian_layout"] = "jacobian[i][j] = d_i E_j, per metre";

  const Geometry g = parse_geometry(t_opts.geometry(), "--theta/--axis");
  rec["geometry"] = t_opts.geometry();
  std::optional<TrapSpec> trap;
  SidebandBranch br = SidebandBranch::bsb;
  if (trap_opts) {
    trap = parse_trap(trap_opts->document(), "--mass/--trap-freq");
    trap->center = r;
    if (branch_name == "rsb") br = SidebandBranch::rsb;
    else if (branch_name != "bsb") throw ConfigError("--branch: expected bsb or rsb");
    if (n < 0) throw ConfigError("--n: must be non-negative");
  }
  json mu = json::array();
  for (const auto& m2 : t_opts.final_projections(true)) {
    const TransitionSpec t = parse_transition(t_opts.transition(), "--J1/--m1/--J2/--multipole",
                                              HalfInt::parse(m2));
    const TransitionKernel kernel(t, g);
    const Complex value = kernel.strength(s);
    json entry{{"m2", t.m2.to_string()},
               {"delta_m", t.delta_m().to_string()},
               {"mu", complex_json(value)},
               {"abs", std::abs(value)}};
    if (trap) {
      json sb = json::object();
      for (TrapMode q : {TrapMode::X, TrapMode::Y, TrapMode::Z}) {
        const Complex v = sideband_from_sample(s, kernel, *trap, {q, n, br});
        sb[to_string(q)] = {{"value", complex_json(v)}, {"abs", std::abs(v)}};
      }
      entry["sidebands"] = sb;
    }
    mu.push_back(entry);
  }
  rec["mu"] = mu;
  if (trap) {
    rec["trap"] = trap_opts->document();
    rec["sideband_branch"] = to_string(br);
    rec["n"] = n;
  }
  return rec;
}

struct FigureBeam {
  const char* tag;
  json beam;
};

json figure_document(const FigureBeam& fb, int resolution, unsigned threads) {
  json beam = fb.beam;
  beam["waist"] = "1 um";
  beam["wavelength"] = "729 nm";
  json obs = json::array();
  for (const char* c : {"Ez", "Esigma+", "Esigma-"})
    obs.push_back({{"kind", "field"}, {"component", c}, {"name", std::string("fig1_") + c}});
  for (const char* m2 : {"-3/2", "-1/2", "1/2", "3/2", "5/2"}) {
    const int dm = (HalfInt::parse(m2) - HalfInt::from_twice(1)).twice() / 2;
    obs.push_back({{"kind", "strength"}, {"m2", m2}, {"name", "fig2_dm" + std::to_string(dm)}});
  }
  for (int theta : {0, 30, 45, 90})
    obs.push_back({{"kind", "strength"},
                   {"m2", "1/2"},
                   {"geometry", {{"theta", std::to_string(theta) + " deg"}, {"axis", {0, 1, 0}}}},
                   {"name", "fig3_theta" + std::to_string(theta)}});
  obs.push_back({{"kind", "sideband"}, {"branch", "carrier"}, {"m2", "3/2"}, {"name", "fig4_carrier"}});
  for (const char* q : {"X", "Y", "Z"})
    obs.push_back({{"kind", "sideband"},
                   {"branch", "bsb"},
                   {"mode", q},
                   {"n", 0},
                   {"m2", "3/2"},
                   {"lamb_dicke_rescale", true},
                   {"name", std::string("fig4_bsb_") + q}});
  json doc{{"name", fb.tag},
           {"beam", beam},
           {"grid", {{"half_width", "2 um"}, {"resolution", resolution}, {"z", "0 um"}}},
           {"transition", {{"J1", "1/2"}, {"m1", "1/2"}, {"J2", "5/2"}, {"multipole", "E2_dJ2"}}},
           {"trap", {{"mass", "40 u"}, {"frequencies", {"1 MHz", "1 MHz", "1 MHz"}}}},
           {"observables", obs}};
  if (threads != 0) doc["threads"] = threads;
  return doc;
}

} // namespace

std::vector<json> figure_beams_documents(int resolution, unsigned threads);

std::vector<json> figure_beams_documents(int resolution, unsigned threads) {
  const std::vector<FigureBeam> beams{
      {"gauss", {{"type", "gauss"}, {"sigma", 1}}},
      {"hg10", {{"type", "hg"}, {"m", 1}, {"n", 0}, {"sigma", 1}}},
      {"lg1p", {{"type", "lg"}, {"l", 1}, {"p", 0}, {"sigma", 1}}},
      {"lg1m", {{"type", "lg"}, {"l", 1}, {"p", 0}, {"sigma", -1}}},
      {"radial", {{"type", "radial"}}},
      {"azimuthal", {{"type", "azimuthal"}}},
  };
  std::vector<json> docs;
  for (const auto& b : beams) docs.push_back(figure_document(b, resolution, threads));
  return docs;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured-light multipole transition strengths", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  // field-map
  auto* field = app.add_subcommand("field-map", "field component moduli over the focal plane");
  BeamOptions field_beam;
  GridOptions field_grid;
  OutputOptions field_out;
  std::vector<std::string> components;
  field_beam.add(*field);
  field_grid.add(*field);
  field_out.add(*field, "field");
  field->add_option("--component", components, "Ez | Esigma+ | Esigma- | Ex | Ey (repeatable)");

  // transition-map
  auto* trans = app.add_subcommand("transition-map", "relative transition strengths per delta m");
  BeamOptions trans_beam;
  GridOptions trans_grid;
  OutputOptions trans_out;
  TransitionOptions trans_t;
  trans_beam.add(*trans);
  trans_grid.add(*trans);
  trans_out.add(*trans, "transition");
  trans_t.add(*trans, "final projection (default: every reachable m2)");

  // sideband-map
  auto* side = app.add_subcommand("sideband-map", "carrier and first-order sideband strengths");
  BeamOptions side_beam;
  GridOptions side_grid;
  OutputOptions side_out;
  TransitionOptions side_t;
  TrapOptions side_trap;
  int side_n = 0;
  std::string side_branch = "bsb";
  bool side_no_rescale = false;
  side_beam.add(*side);
  side_grid.add(*side);
  side_out.add(*side, "sideband");
  side_t.add(*side, "final projection (default: m1 + 1)");
  side_trap.add(*side);
  side->add_option("--n", side_n, "initial motional quantum number");
  side->add_option("--branch", side_branch, "bsb | rsb");
  side->add_flag("--no-rescale", side_no_rescale, "do not divide sidebands by the Lamb-Dicke parameters");

  // point
  auto* point = app.add_subcommand("point", "field, gradients and strengths at one position as JSON");
  BeamOptions point_beam;
  TransitionOptions point_t;
  TrapOptions point_trap;
  std::string point_at = "0,0,0";
  bool point_sidebands = false;
  int point_n = 0;
  std::string point_branch = "bsb";
  point_beam.add(*point);
  point_t.add(*point, "final projection (default: every m2 of J2)");
  point_trap.add(*point);
  point->add_option("--at", point_at, "position x,y,z in micrometres");
  point->add_flag("--sidebands", point_sidebands, "also report first-order sidebands");
  point->add_option("--n", point_n, "initial motional quantum number");
  point->add_option("--branch", point_branch, "bsb | rsb");

  // compare
  auto* compare = app.add_subcommand("compare", "difference statistics of two map CSV files");
  std::string cmp_a, cmp_b;
  compare->add_option("first", cmp_a, "map CSV")->required();
  compare->add_option("second", cmp_b, "map CSV")->required();

  // run
  auto* run = app.add_subcommand("run", "execute a JSON run file");
  std::string run_file, run_sidecar;
  std::optional<std::string> run_out;
  auto* run_file_opt = run->add_option("file", run_file, "run file");
  run->add_option("--from-sidecar", run_sidecar, "re-run the document echoed in a sidecar")->excludes(run_file_opt);
  run->add_option("--out", run_out, "output directory (overrides the run file)");

  // figures
  auto* figures = app.add_subcommand("figures", "all focal-plane panels of the reference figure set");
  std::string fig_out = "figures";
  int fig_resolution = 256;
  unsigned fig_threads = 0;
  figures->add_option("--out", fig_out, "output directory");
  figures->add_option("--resolution", fig_resolution, "nodes per axis");
  figures->add_option("--threads", fig_threads, "worker threads (0: all cores)");

  // gnuplot
  auto* gnuplot = app.add_subcommand("gnuplot", "convert a map CSV into a gnuplot nonuniform matrix");
  std::string gp_in, gp_out;
  gnuplot->add_option("input", gp_in, "map CSV")->required();
  gnuplot->add_option("output", gp_out, "matrix file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (field->parsed()) {
      json doc{{"beam", field_beam.document()}, {"grid", field_grid.document(field_beam.waist_um)},
               {"backend", field_beam.backend}};
      field_out.fill(doc);
      if (components.empty()) components = {"Ez", "Esigma+", "Esigma-"};
      json obs = json::array();
      for (const auto& c : components) obs.push_back({{"kind", "field"}, {"component", c}});
      doc["observables"] = obs;
      run_document(doc, std::nullopt, out);
    } else if (trans->parsed()) {
      json doc{{"beam", trans_beam.document()}, {"grid", trans_grid.document(trans_beam.waist_um)},
               {"backend", trans_beam.backend},  {"transition", trans_t.transition()},
               {"geometry", trans_t.geometry()}};
      trans_out.fill(doc);
      json obs = json::array();
      for (const auto& m2 : trans_t.final_projections(false)) obs.push_back({{"kind", "strength"}, {"m2", m2}});
      doc["observables"] = obs;
      run_document(doc, std::nullopt, out);
    } else if (side->parsed()) {
      if (side_branch != "bsb" && side_branch != "rsb") throw ConfigError("--branch: expected bsb or rsb");
      if (side_t.m2.empty()) {
        try {
          side_t.m2 = (HalfInt::parse(side_t.m1) + HalfInt(1)).to_string();
        } catch (const std::invalid_argument&) {
          throw ConfigError("--m1: expected an integer or half-integer such as 1/2");
        }
      }
      json doc{{"beam", side_beam.document()}, {"grid", side_grid.document(side_beam.waist_um)},
               {"backend", side_beam.backend},  {"transition", side_t.transition()},
               {"geometry", side_t.geometry()}, {"trap", side_trap.document()}};
      side_out.fill(doc);
      json obs = json::array({{{"kind", "sideband"}, {"branch", "carrier"}, {"m2", side_t.m2}}});
      for (const char* q : {"X", "Y", "Z"})
        obs.push_back({{"kind", "sideband"},
                       {"branch", side_branch},
                       {"mode", q},
                       {"n", side_n},
                       {"m2", side_t.m2},
                       {"lamb_dicke_rescale", !side_no_rescale}});
      doc["observables"] = obs;
      run_document(doc, std::nullopt, out);
    } else if (point->parsed()) {
      std::optional<TrapOptions> trap;
      if (point_sidebands) trap = point_trap;
      out << point_record(point_beam, point_t, point_at, trap, point_n, point_branch).dump(2) << "\n";
    } else if (compare->parsed()) {
      const MapDataset a = read_map_csv(cmp_a);
      const MapDataset b = read_map_csv(cmp_b);
      MapDifference d;
      try {
        d = compare_maps(a, b);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      out << json{{"max_abs_diff", d.max_abs_diff}, {"rms_diff", d.rms_diff}}.dump() << "\n";
    } else if (run->parsed()) {
      json doc;
      if (!run_sidecar.empty()) {
        const json sidecar = load_json_file(run_sidecar);
        if (!sidecar.is_object() || !sidecar.contains("run"))
          throw ConfigError(run_sidecar + ": sidecar has no \"run\" document");
        doc = sidecar["run"];
      } else if (!run_file.empty()) {
        doc = load_json_file(run_file);
      } else {
        throw ConfigError("run: a run file or --from-sidecar is required");
      }
      run_document(doc, run_out, out);
    } else if (figures->parsed()) {
      const auto t0 = std::chrono::steady_clock::now();
      std::size_t count = 0;
      for (const json& doc : figure_beams_documents(fig_resolution, fig_threads)) {
        const auto outputs = execute_run(parse_run(doc), std::filesystem::path(fig_out));
        count += outputs.size();
      }
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out << json{{"maps", count}, {"resolution", fig_resolution}, {"seconds", seconds}, {"output_dir", fig_out}}.dump()
          << "\n";
    } else if (gnuplot->parsed()) {
      write_atomically(gp_out, gnuplot_matrix(read_map_csv(gp_in)));
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

} // namespace tl
