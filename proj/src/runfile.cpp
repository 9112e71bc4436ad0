#include "tensorlight/runfile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tensorlight/error.hpp"
#include "tensorlight/io.hpp"
#include "tensorlight/version.hpp"

namespace tl {

using nlohmann::json;

namespace {

std::string member(const std::string& path, const std::string& key) { return path + "." + key; }
std::string element(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      throw ConfigError(member(path, key) + ": unknown key (allowed: " + list + ")");
    }
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& required(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(member(path, key) + ": missing required field");
  return *v;
}

double quantity(const json& v, Dimension d, const std::string& path) {
  if (!v.is_string())
    throw ConfigError(path + ": expected a string with value and unit, e.g. \"1 um\"");
  return parse_quantity(v.get<std::string>(), d, path);
}

double quantity_or(const json& j, const char* key, Dimension d, const std::string& path, double fallback) {
  const json* v = find(j, key);
  return v ? quantity(*v, d, member(path, key)) : fallback;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<int>();
}

int integer_or(const json& j, const char* key, const std::string& path, int fallback) {
  const json* v = find(j, key);
  return v ? integer(*v, member(path, key)) : fallback;
}

bool boolean_or(const json& j, const char* key, const std::string& path, bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(member(path, key) + ": expected true or false");
  return v->get<bool>();
}

std::string string_value(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

Vec3 vector3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path + ": expected an array of 3 numbers");
  return {number(v[0], element(path, 0)), number(v[1], element(path, 1)), number(v[2], element(path, 2))};
}

HalfInt half_int(const json& v, const std::string& path) {
  try {
    if (v.is_string()) return HalfInt::parse(v.get<std::string>());
    if (v.is_number()) {
      const double twice = 2.0 * v.get<double>();
      if (twice == std::round(twice)) return HalfInt::from_twice(static_cast<int>(twice));
    }
  } catch (const std::invalid_argument&) {
  }
  throw ConfigError(path + ": expected an integer or half-integer such as \"5/2\"");
}

int sigma_value(const json& j, const std::string& path) {
  const int s = integer_or(j, "sigma", path, 1);
  if (s < -1 || s > 1) throw ConfigError(member(path, "sigma") + ": must be -1, 0 or +1");
  return s;
}

ModeTerm mode_term(const json& j, const std::string& type, const std::string& path) {
  ModeTerm t;
  t.sigma = sigma_value(j, path);
  if (type == "gauss") {
    t.family = LaguerreGauss{0, 0};
  } else if (type == "lg") {
    const int l = integer(required(j, "l", path), member(path, "l"));
    const int p = integer_or(j, "p", path, 0);
    if (p < 0) throw ConfigError(member(path, "p") + ": must be non-negative");
    t.family = LaguerreGauss{l, p};
  } else if (type == "hg") {
    const int m = integer(required(j, "m", path), member(path, "m"));
    const int n = integer(required(j, "n", path), member(path, "n"));
    if (m < 0) throw ConfigError(member(path, "m") + ": must be non-negative");
    if (n < 0) throw ConfigError(member(path, "n") + ": must be non-negative");
    t.family = HermiteGauss{m, n};
  } else {
    throw ConfigError(member(path, "type") + ": unknown mode type '" + type + "'");
  }
  return t;
}

std::string format_degrees(double radians) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", radians * 180.0 / kPi);
  return buf;
}

json transition_json(const TransitionSpec& t) {
  return {{"J1", t.j1.to_string()}, {"m1", t.m1.to_string()}, {"J2", t.j2.to_string()},
          {"m2", t.m2.to_string()}, {"multipole", to_string(t.multipole)}, {"delta_m", t.delta_m().to_string()}};
}

json geometry_json(const Geometry& g) {
  return {{"theta_deg", g.theta * 180.0 / kPi}, {"axis", {g.axis[0], g.axis[1], g.axis[2]}}};
}

json trap_json(const TrapSpec& t) {
  json axes = json::array();
  for (const auto& a : t.axes) axes.push_back({a[0], a[1], a[2]});
  return {{"mass_kg", t.mass},
          {"frequencies_MHz",
           {t.frequencies[0] / (2e6 * kPi), t.frequencies[1] / (2e6 * kPi), t.frequencies[2] / (2e6 * kPi)}},
          {"axes", axes}};
}

TrapMode trap_mode(const std::string& s, const std::string& path) {
  if (s == "X" || s == "x") return TrapMode::X;
  if (s == "Y" || s == "y") return TrapMode::Y;
  if (s == "Z" || s == "z") return TrapMode::Z;
  throw ConfigError(path + ": expected X, Y or Z");
}

SidebandBranch branch(const std::string& s, const std::string& path) {
  if (s == "carrier") return SidebandBranch::carrier;
  if (s == "bsb") return SidebandBranch::bsb;
  if (s == "rsb") return SidebandBranch::rsb;
  throw ConfigError(path + ": expected carrier, bsb or rsb");
}

FieldComponent component(const std::string& s, const std::string& path) {
  if (s == "Ez") return FieldComponent::Ez;
  if (s == "Esigma+" || s == "E+") return FieldComponent::Esigma_plus;
  if (s == "Esigma-" || s == "E-") return FieldComponent::Esigma_minus;
  if (s == "Ex") return FieldComponent::Ex;
  if (s == "Ey") return FieldComponent::Ey;
  throw ConfigError(path + ": expected one of Ez, Esigma+, Esigma-, Ex, Ey");
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == '/' || c == '|') c = '_';
    else if (c == '+') c = 'p';
  return s;
}

} // namespace

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON");
  }
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

BeamSpec parse_beam(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = string_value(required(j, "type", path), member(path, "type"));
  if (type == "gauss") {
    check_keys(j, path, {"type", "sigma", "waist", "wavelength", "amplitude"});
  } else if (type == "lg") {
    check_keys(j, path, {"type", "l", "p", "sigma", "waist", "wavelength", "amplitude"});
  } else if (type == "hg") {
    check_keys(j, path, {"type", "m", "n", "sigma", "waist", "wavelength", "amplitude"});
  } else if (type == "radial" || type == "azimuthal") {
    check_keys(j, path, {"type", "waist", "wavelength", "amplitude"});
  } else if (type == "superposition") {
    check_keys(j, path, {"type", "terms", "waist", "wavelength", "amplitude"});
  } else {
    throw ConfigError(member(path, "type") + ": unknown beam type '" + type +
                      "' (gauss, lg, hg, radial, azimuthal, superposition)");
  }
  const double waist = quantity(required(j, "waist", path), Dimension::length, member(path, "waist"));
  const double wavelength = quantity(required(j, "wavelength", path), Dimension::length, member(path, "wavelength"));
  const double amplitude = find(j, "amplitude") ? number(j["amplitude"], member(path, "amplitude")) : 1.0;
  if (!(waist > 0.0)) throw ConfigError(member(path, "waist") + ": must be positive");
  if (!(wavelength > 0.0)) throw ConfigError(member(path, "wavelength") + ": must be positive");

  std::vector<BeamTerm> terms;
  if (type == "radial" || type == "azimuthal") {
    terms = make_radial_azimuthal(type == "radial" ? VectorBeamKind::radial : VectorBeamKind::azimuthal, waist,
                                  wavelength)
                .terms();
  } else if (type == "superposition") {
    const json& list = required(j, "terms", path);
    const std::string lpath = member(path, "terms");
    if (!list.is_array() || list.empty()) throw ConfigError(lpath + ": expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& t = list[i];
      const std::string tpath = element(lpath, i);
      check_keys(t, tpath, {"weight", "type", "l", "p", "m", "n", "sigma"});
      const std::string ttype = string_value(required(t, "type", tpath), member(tpath, "type"));
      Complex weight = 1.0;
      if (const json* w = find(t, "weight")) {
        if (w->is_array() && w->size() == 2)
          weight = {number((*w)[0], member(tpath, "weight[0]")), number((*w)[1], member(tpath, "weight[1]"))};
        else
          weight = number(*w, member(tpath, "weight"));
      }
      terms.push_back({weight, mode_term(t, ttype, tpath)});
    }
  } else {
    terms.push_back({1.0, mode_term(j, type, path)});
  }
  try {
    return BeamSpec(std::move(terms), wavelength, waist, amplitude);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

TransitionSpec parse_transition(const json& j, const std::string& path, const std::optional<HalfInt>& m2_override) {
  check_keys(j, path, {"J1", "m1", "J2", "m2", "multipole"});
  const HalfInt j1 = find(j, "J1") ? half_int(j["J1"], member(path, "J1")) : HalfInt::from_twice(1);
  const HalfInt m1 = find(j, "m1") ? half_int(j["m1"], member(path, "m1")) : HalfInt::from_twice(1);
  const HalfInt j2 = find(j, "J2") ? half_int(j["J2"], member(path, "J2")) : HalfInt::from_twice(5);
  std::optional<HalfInt> m2 = m2_override;
  if (!m2 && find(j, "m2")) m2 = half_int(j["m2"], member(path, "m2"));
  if (!m2) throw ConfigError(member(path, "m2") + ": missing required field");
  Multipole mp = Multipole::E2_dJ2;
  if (const json* v = find(j, "multipole")) {
    const std::string s = string_value(*v, member(path, "multipole"));
    if (s == "E1") mp = Multipole::E1;
    else if (s == "E2_dJ1") mp = Multipole::E2_dJ1;
    else if (s == "E2_dJ2") mp = Multipole::E2_dJ2;
    else throw ConfigError(member(path, "multipole") + ": expected E1, E2_dJ1 or E2_dJ2");
  }
  try {
    return TransitionSpec(j1, m1, j2, *m2, mp);
  } catch (const std::domain_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Geometry parse_geometry(const json& j, const std::string& path) {
  check_keys(j, path, {"theta", "axis"});
  const double theta = quantity_or(j, "theta", Dimension::angle, path, 0.0);
  const Vec3 axis = find(j, "axis") ? vector3(j["axis"], member(path, "axis")) : Vec3{0.0, 1.0, 0.0};
  try {
    return Geometry(theta, axis);
  } catch (const std::domain_error& e) {
    throw ConfigError(member(path, "axis") + ": " + e.what());
  }
}

TrapSpec parse_trap(const json& j, const std::string& path) {
  check_keys(j, path, {"mass", "frequencies", "axes"});
  TrapSpec t;
  t.mass = quantity(required(j, "mass", path), Dimension::mass, member(path, "mass"));
  const json& f = required(j, "frequencies", path);
  const std::string fpath = member(path, "frequencies");
  if (!f.is_array() || f.size() != 3) throw ConfigError(fpath + ": expected 3 frequencies for modes X, Y, Z");
  for (std::size_t q = 0; q < 3; ++q) t.frequencies[q] = quantity(f[q], Dimension::frequency, element(fpath, q));
  if (const json* a = find(j, "axes")) {
    const std::string apath = member(path, "axes");
    if (!a->is_array() || a->size() != 3) throw ConfigError(apath + ": expected 3 axis vectors");
    for (std::size_t q = 0; q < 3; ++q) t.axes[q] = vector3((*a)[q], element(apath, q));
  }
  try {
    t.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return t;
}

GridSpec parse_grid(const json& j, const std::string& path) {
  check_keys(j, path, {"half_width", "resolution", "x_min", "x_max", "y_min", "y_max", "nx", "ny", "z"});
  GridSpec g;
  if (find(j, "half_width")) {
    for (const char* k : {"x_min", "x_max", "y_min", "y_max"})
      if (find(j, k)) throw ConfigError(member(path, k) + ": cannot be combined with half_width");
    const double h = quantity(j["half_width"], Dimension::length, member(path, "half_width"));
    g.x_min = g.y_min = -h;
    g.x_max = g.y_max = h;
  } else {
    g.x_min = quantity_or(j, "x_min", Dimension::length, path, g.x_min);
    g.x_max = quantity_or(j, "x_max", Dimension::length, path, g.x_max);
    g.y_min = quantity_or(j, "y_min", Dimension::length, path, g.y_min);
    g.y_max = quantity_or(j, "y_max", Dimension::length, path, g.y_max);
  }
  if (find(j, "resolution")) {
    if (find(j, "nx") || find(j, "ny")) throw ConfigError(member(path, "resolution") + ": cannot be combined with nx/ny");
    g.nx = g.ny = integer(j["resolution"], member(path, "resolution"));
  } else {
    g.nx = integer_or(j, "nx", path, g.nx);
    g.ny = integer_or(j, "ny", path, g.ny);
  }
  g.z = quantity_or(j, "z", Dimension::length, path, 0.0);
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return g;
}

DiffBackend parse_backend(const std::string& s, const std::string& path) {
  if (s == "auto" || s == "automatic") return DiffBackend::automatic;
  if (s == "analytic") return DiffBackend::analytic;
  if (s == "fd") return DiffBackend::finite_difference;
  throw ConfigError(path + ": expected auto, analytic or fd");
}

RunPlan parse_run(const json& doc) {
  const std::string root = "run";
  check_keys(doc, root,
             {"name", "output_dir", "beam", "grid", "transition", "geometry", "trap", "observables", "backend",
              "keep_complex", "threads"});
  RunPlan plan{.document = doc,
               .name = find(doc, "name") ? string_value(doc["name"], "run.name") : "map",
               .output_dir = find(doc, "output_dir") ? string_value(doc["output_dir"], "run.output_dir") : ".",
               .beam = parse_beam(required(doc, "beam", root), "run.beam"),
               .grid = find(doc, "grid") ? parse_grid(doc["grid"], "run.grid") : GridSpec{},
               .backend = find(doc, "backend")
                              ? parse_backend(string_value(doc["backend"], "run.backend"), "run.backend")
                              : DiffBackend::automatic,
               .keep_complex = boolean_or(doc, "keep_complex", root, false),
               .threads = 0,
               .maps = {}};
  if (const json* t = find(doc, "threads")) {
    const int n = integer(*t, "run.threads");
    if (n < 0) throw ConfigError("run.threads: must be non-negative");
    plan.threads = static_cast<unsigned>(n);
  }
  if (plan.backend == DiffBackend::analytic && !plan.beam.analytic())
    throw ConfigError("run.backend: analytic derivatives are unavailable for this beam");

  const Geometry geometry = find(doc, "geometry") ? parse_geometry(doc["geometry"], "run.geometry") : Geometry{};
  std::optional<TrapSpec> trap;
  if (find(doc, "trap")) trap = parse_trap(doc["trap"], "run.trap");
  const json transition_section = find(doc, "transition") ? doc["transition"] : json::object();
  if (find(doc, "transition")) require_object(transition_section, "run.transition");

  const json& list = required(doc, "observables", root);
  if (!list.is_array() || list.empty()) throw ConfigError("run.observables: expected a non-empty array");
  std::set<std::string> stems;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& o = list[i];
    const std::string opath = element("run.observables", i);
    require_object(o, opath);
    const std::string kind = string_value(required(o, "kind", opath), member(opath, "kind"));
    Observable obs;
    json description{{"kind", kind}};
    std::string suffix;
    if (kind == "field") {
      check_keys(o, opath, {"kind", "component", "name"});
      obs = field_observable(component(string_value(required(o, "component", opath), member(opath, "component")),
                                       member(opath, "component")));
      description["component"] = to_string(obs.component);
    } else if (kind == "strength" || kind == "sideband") {
      if (kind == "strength")
        check_keys(o, opath, {"kind", "m2", "geometry", "name"});
      else
        check_keys(o, opath, {"kind", "m2", "geometry", "name", "branch", "mode", "n", "lamb_dicke_rescale"});
      std::optional<HalfInt> m2;
      if (find(o, "m2")) m2 = half_int(o["m2"], member(opath, "m2"));
      const TransitionSpec t = [&] {
        try {
          return parse_transition(transition_section, "run.transition", m2);
        } catch (const ConfigError& e) {
          if (!m2) throw;
          throw ConfigError(member(opath, "m2") + ": not usable with " + e.what());
        }
      }();
      Geometry g = geometry;
      if (find(o, "geometry")) {
        g = parse_geometry(o["geometry"], member(opath, "geometry"));
        suffix = "_theta" + format_degrees(g.theta);
      }
      description["transition"] = transition_json(t);
      description["geometry"] = geometry_json(g);
      if (kind == "strength") {
        obs = strength_observable(t, g);
      } else {
        if (!trap) throw ConfigError(opath + ": sideband observable needs run.trap");
        SidebandRequest req;
        req.branch = branch(string_value(required(o, "branch", opath), member(opath, "branch")), member(opath, "branch"));
        if (find(o, "mode"))
          req.mode = trap_mode(string_value(o["mode"], member(opath, "mode")), member(opath, "mode"));
        else if (req.branch != SidebandBranch::carrier)
          throw ConfigError(member(opath, "mode") + ": missing required field");
        req.n = integer_or(o, "n", opath, 0);
        if (req.n < 0) throw ConfigError(member(opath, "n") + ": must be non-negative");
        obs = sideband_observable(t, g, *trap, req, boolean_or(o, "lamb_dicke_rescale", opath, false));
        description["branch"] = to_string(req.branch);
        if (req.branch != SidebandBranch::carrier) {
          description["mode"] = to_string(req.mode);
          description["n"] = req.n;
        }
        description["lamb_dicke_rescale"] = obs.lamb_dicke_rescale;
      }
    } else {
      throw ConfigError(member(opath, "kind") + ": expected field, strength or sideband");
    }
    const std::string stem =
        file_safe(plan.name + "_" + (find(o, "name") ? string_value(o["name"], member(opath, "name"))
                                                        : obs.label() + suffix));
    if (!stems.insert(stem).second)
      throw ConfigError(opath + ": output name '" + stem + "' is used twice; set a distinct name");
    description["label"] = obs.label();
    plan.maps.push_back({stem, obs, description});
  }
  return plan;
}

std::vector<RunOutput> execute_run(const RunPlan& plan, const std::optional<std::filesystem::path>& output_dir) {
  const std::filesystem::path dir = output_dir ? *output_dir : std::filesystem::path(plan.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<Observable> observables;
  for (const auto& m : plan.maps) observables.push_back(m.observable);
  std::vector<MapDataset> maps =
      run_scans(plan.beam, plan.grid, observables, plan.backend, plan.keep_complex, plan.threads);

  std::vector<RunOutput> out;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const PlannedMap& pm = plan.maps[i];
    MapDataset& map = maps[i];
    RunOutput r{dir / (pm.stem + ".csv"), dir / (pm.stem + ".json"), std::move(map)};
    write_atomically(r.csv, map_csv(r.map, r.map.values));
    json sidecar{{"scale_factor", r.map.scale_factor},
                 {"grid", grid_json(plan.grid)},
                 {"beam", plan.document["beam"]},
                 {"transition", pm.description.contains("transition") ? pm.description["transition"] : json()},
                 {"geometry", pm.description.contains("geometry") ? pm.description["geometry"] : json()},
                 {"trap", pm.observable.trap ? trap_json(*pm.observable.trap) : json()},
                 {"observable", pm.description},
                 {"csv", r.csv.filename().string()},
                 {"tool_version", std::string(kToolName) + " " + kToolVersion},
                 {"timestamp", r.map.timestamp},
                 {"run", plan.document}};
    if (plan.keep_complex) {
      std::vector<double> re(r.map.complex_values.size()), im(r.map.complex_values.size());
      for (std::size_t n = 0; n < re.size(); ++n) {
        re[n] = r.map.complex_values[n].real();
        im[n] = r.map.complex_values[n].imag();
      }
      const auto re_path = dir / (pm.stem + ".re.csv");
      const auto im_path = dir / (pm.stem + ".im.csv");
      write_atomically(re_path, map_csv(r.map, re));
      write_atomically(im_path, map_csv(r.map, im));
      sidecar["complex_csv"] = {re_path.filename().string(), im_path.filename().string()};
    }
    write_atomically(r.sidecar, sidecar.dump(2) + "\n");
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace tl
