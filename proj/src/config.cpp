#include "invasion/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace invasion {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& where, const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& where, const std::string& text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& where, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(where + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& where, const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(where, trim(item)));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

template <class E>
using Names = std::vector<std::pair<E, const char*>>;

const Names<GrowthForm> kGrowthNames{
    {GrowthForm::constant, "constant"}, {GrowthForm::rational, "rational"}, {GrowthForm::tabulated, "tabulated"}};
const Names<SourceForm> kSourceNames{{SourceForm::logistic_acid, "logistic_acid"},
                                     {SourceForm::destabilizing, "destabilizing"},
                                     {SourceForm::none, "none"},
                                     {SourceForm::tabulated, "tabulated"}};
const Names<DiffusionForm> kDiffusionNames{
    {DiffusionForm::constant, "constant"}, {DiffusionForm::linear, "linear"}, {DiffusionForm::tabulated, "tabulated"}};
const Names<InitialForm> kInitialNames{{InitialForm::paper, "paper"},
                                       {InitialForm::constant, "constant"},
                                       {InitialForm::tabulated, "tabulated"},
                                       {InitialForm::perturbed, "perturbed"}};
const Names<AcidInitialForm> kAcidNames{{AcidInitialForm::constant, "constant"},
                                        {AcidInitialForm::tabulated, "tabulated"}};
const Names<KernelBoundary> kBoundaryNames{{KernelBoundary::zero, "zero"}, {KernelBoundary::reflect, "reflect"}};
const Names<ConvolutionEngine> kEngineNames{{ConvolutionEngine::direct, "direct"},
                                            {ConvolutionEngine::spectral, "spectral"},
                                            {ConvolutionEngine::automatic, "automatic"}};
const Names<EquilibriumDist::Form> kEquilibriumNames{{EquilibriumDist::Form::uniform, "uniform"},
                                                     {EquilibriumDist::Form::tabulated, "tabulated"}};
const Names<RunMode> kModeNames{
    {RunMode::simulate, "simulate"}, {RunMode::stability, "stability"}, {RunMode::kinetic, "kinetic"},
    {RunMode::suite, "suite"}};

template <class E>
std::string name_of(const Names<E>& names, E value) {
  for (const auto& [e, n] : names) {
    if (e == value) return n;
  }
  return "?";
}

template <class E>
E value_of(const Names<E>& names, const std::string& where, const std::string& text) {
  for (const auto& [e, n] : names) {
    if (text == n) return e;
  }
  std::string allowed;
  for (const auto& [e, n] : names) allowed += std::string(allowed.empty() ? "" : ", ") + n;
  throw ConfigError(where + ": unknown value '" + text + "' (allowed: " + allowed + ")");
}

// One schema entry: how to read a key into a RunConfig and how to echo it.
struct Entry {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string& where, const std::string& text)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Ref>
Entry number(std::string sec, std::string key, Ref ref) {
  return {std::move(sec), std::move(key),
          [ref](RunConfig& c, const std::string& w, const std::string& t) { ref(c) = parse_double(w, t); },
          [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Entry integer(std::string sec, std::string key, Ref ref) {
  return {std::move(sec), std::move(key),
          [ref](RunConfig& c, const std::string& w, const std::string& t) {
            auto& target = ref(c);
            const long long v = parse_integer(w, t);
            using T = std::remove_reference_t<decltype(target)>;
            constexpr long long lo = static_cast<long long>(std::numeric_limits<T>::min());
            constexpr bool capped = std::numeric_limits<T>::max() <= std::numeric_limits<long long>::max();
            if (v < lo || (capped && v > static_cast<long long>(std::numeric_limits<T>::max()))) {
              throw ConfigError(w + ": integer out of range");
            }
            target = static_cast<T>(v);
          },
          [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); }};
}

template <class Ref>
Entry boolean(std::string sec, std::string key, Ref ref) {
  return {std::move(sec), std::move(key),
          [ref](RunConfig& c, const std::string& w, const std::string& t) { ref(c) = parse_bool(w, t); },
          [ref](const RunConfig& c) { return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false"); }};
}

template <class Ref>
Entry list(std::string sec, std::string key, Ref ref) {
  return {std::move(sec), std::move(key),
          [ref](RunConfig& c, const std::string& w, const std::string& t) { ref(c) = parse_list(w, t); },
          [ref](const RunConfig& c) { return format_list(ref(const_cast<RunConfig&>(c))); }};
}

template <class E, class Ref>
Entry choice(std::string sec, std::string key, const Names<E>& names, Ref ref) {
  return {std::move(sec), std::move(key),
          [ref, &names](RunConfig& c, const std::string& w, const std::string& t) { ref(c) = value_of(names, w, t); },
          [ref, &names](const RunConfig& c) { return name_of(names, ref(const_cast<RunConfig&>(c))); }};
}

const std::vector<Entry>& schema() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(choice("run", "mode", kModeNames, [](RunConfig& c) -> RunMode& { return c.mode; }));
    e.push_back(integer("run", "seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));

    e.push_back(number("domain", "a", [](RunConfig& c) -> double& { return c.half_length; }));
    e.push_back(integer("domain", "n_cells", [](RunConfig& c) -> int& { return c.n_cells; }));

    e.push_back(number("model", "alpha", [](RunConfig& c) -> double& { return c.model.alpha; }));
    e.push_back(number("model", "beta", [](RunConfig& c) -> double& { return c.model.beta; }));
    e.push_back(boolean("model", "blow_up_study", [](RunConfig& c) -> bool& { return c.model.blow_up_study; }));
    e.push_back(number("model", "D_H", [](RunConfig& c) -> double& { return c.model.D_H; }));
    e.push_back(
        boolean("model", "renormalize_kernel", [](RunConfig& c) -> bool& { return c.model.renormalize_kernel; }));
    e.push_back(choice("model", "kernel_boundary", kBoundaryNames,
                       [](RunConfig& c) -> KernelBoundary& { return c.model.kernel_boundary; }));
    e.push_back(
        choice("model", "engine", kEngineNames, [](RunConfig& c) -> ConvolutionEngine& { return c.model.engine; }));

    e.push_back(choice("model.diffusion", "form", kDiffusionNames,
                       [](RunConfig& c) -> DiffusionForm& { return c.model.diffusion.form; }));
    e.push_back(number("model.diffusion", "value", [](RunConfig& c) -> double& { return c.model.diffusion.value; }));
    e.push_back(number("model.diffusion", "slope", [](RunConfig& c) -> double& { return c.model.diffusion.slope; }));
    e.push_back(list("model.diffusion", "nodes",
                     [](RunConfig& c) -> std::vector<double>& { return c.model.diffusion.nodes; }));

    e.push_back(
        choice("model.growth", "form", kGrowthNames, [](RunConfig& c) -> GrowthForm& { return c.model.growth.form; }));
    e.push_back(number("model.growth", "mu0", [](RunConfig& c) -> double& { return c.model.growth.mu0; }));
    e.push_back(number("model.growth", "delta", [](RunConfig& c) -> double& { return c.model.growth.delta; }));
    e.push_back(
        list("model.growth", "table_h", [](RunConfig& c) -> std::vector<double>& { return c.model.growth.table.x; }));
    e.push_back(
        list("model.growth", "table_mu", [](RunConfig& c) -> std::vector<double>& { return c.model.growth.table.y; }));

    e.push_back(
        choice("model.source", "form", kSourceNames, [](RunConfig& c) -> SourceForm& { return c.model.source.form; }));
    e.push_back(number("model.source", "gamma", [](RunConfig& c) -> double& { return c.model.source.gamma; }));
    e.push_back(number("model.source", "H", [](RunConfig& c) -> double& { return c.model.source.H; }));
    e.push_back(number("model.source", "G", [](RunConfig& c) -> double& { return c.model.source.G; }));
    e.push_back(
        list("model.source", "table_u", [](RunConfig& c) -> std::vector<double>& { return c.model.source.table.u; }));
    e.push_back(
        list("model.source", "table_h", [](RunConfig& c) -> std::vector<double>& { return c.model.source.table.h; }));
    e.push_back(list("model.source", "table_values",
                     [](RunConfig& c) -> std::vector<double>& { return c.model.source.table.values; }));

    e.push_back({"model.kernel", "family",
                 [](RunConfig& c, const std::string& w, const std::string& t) {
                   try {
                     c.model.kernel.family = kernel_family_from_string(t);
                   } catch (const ConfigError& err) {
                     throw ConfigError(w + ": " + err.what());
                   }
                 },
                 [](const RunConfig& c) { return to_string(c.model.kernel.family); }});
    e.push_back(number("model.kernel", "rho", [](RunConfig& c) -> double& { return c.model.kernel.rho; }));
    e.push_back(number("model.kernel", "sigma", [](RunConfig& c) -> double& { return c.model.kernel.sigma; }));

    e.push_back(choice("initial", "form", kInitialNames, [](RunConfig& c) -> InitialForm& { return c.ic.form; }));
    e.push_back(number("initial", "x_l", [](RunConfig& c) -> double& { return c.ic.x_l; }));
    e.push_back(number("initial", "x_r", [](RunConfig& c) -> double& { return c.ic.x_r; }));
    e.push_back(number("initial", "amplitude", [](RunConfig& c) -> double& { return c.ic.amplitude; }));
    e.push_back(number("initial", "u_value", [](RunConfig& c) -> double& { return c.ic.u_value; }));
    e.push_back(number("initial", "bump_amplitude", [](RunConfig& c) -> double& { return c.ic.bump_amplitude; }));
    e.push_back(number("initial", "bump_center", [](RunConfig& c) -> double& { return c.ic.bump_center; }));
    e.push_back(number("initial", "bump_width", [](RunConfig& c) -> double& { return c.ic.bump_width; }));
    e.push_back(list("initial", "u_table", [](RunConfig& c) -> std::vector<double>& { return c.ic.u_table; }));
    e.push_back(choice("initial", "h_form", kAcidNames, [](RunConfig& c) -> AcidInitialForm& { return c.ic.h_form; }));
    e.push_back(number("initial", "h_value", [](RunConfig& c) -> double& { return c.ic.h_value; }));
    e.push_back(list("initial", "h_table", [](RunConfig& c) -> std::vector<double>& { return c.ic.h_table; }));

    e.push_back({"integrator", "scheme",
                 [](RunConfig& c, const std::string& w, const std::string& t) {
                   try {
                     c.integrator.scheme = scheme_from_string(t);
                   } catch (const ConfigError& err) {
                     throw ConfigError(w + ": " + err.what());
                   }
                 },
                 [](const RunConfig& c) { return to_string(c.integrator.scheme); }});
    e.push_back(number("integrator", "cfl_safety", [](RunConfig& c) -> double& { return c.integrator.cfl_safety; }));
    e.push_back(number("integrator", "dt_max", [](RunConfig& c) -> double& { return c.integrator.dt_max; }));
    e.push_back(number("integrator", "t_end", [](RunConfig& c) -> double& { return c.integrator.t_end; }));
    e.push_back(
        number("integrator", "snapshot_every", [](RunConfig& c) -> double& { return c.integrator.snapshot_every; }));
    e.push_back(
        number("integrator", "blowup_threshold", [](RunConfig& c) -> double& { return c.integrator.blowup_threshold; }));
    e.push_back(
        integer("integrator", "max_rejections", [](RunConfig& c) -> int& { return c.integrator.max_rejections; }));
    e.push_back(number("integrator", "steady_tol", [](RunConfig& c) -> double& { return c.integrator.steady_tol; }));

    e.push_back({"output", "directory",
                 [](RunConfig& c, const std::string&, const std::string& t) { c.output.directory = t; },
                 [](const RunConfig& c) { return c.output.directory; }});
    e.push_back(integer("output", "snapshot_stride", [](RunConfig& c) -> int& { return c.output.snapshot_stride; }));
    e.push_back(boolean("output", "heatmap", [](RunConfig& c) -> bool& { return c.output.heatmap; }));
    e.push_back(boolean("output", "dispersion", [](RunConfig& c) -> bool& { return c.output.dispersion; }));

    e.push_back(integer("stability", "z_max", [](RunConfig& c) -> int& { return c.stability.z_max; }));
    e.push_back(boolean("stability", "local", [](RunConfig& c) -> bool& { return c.stability.local; }));

    e.push_back(number("kinetic", "s1", [](RunConfig& c) -> double& { return c.kinetic.velocities.s1; }));
    e.push_back(number("kinetic", "s2", [](RunConfig& c) -> double& { return c.kinetic.velocities.s2; }));
    e.push_back(choice("kinetic", "equilibrium", kEquilibriumNames,
                       [](RunConfig& c) -> EquilibriumDist::Form& { return c.kinetic.equilibrium.form; }));
    e.push_back(
        list("kinetic", "M_edges", [](RunConfig& c) -> std::vector<double>& { return c.kinetic.equilibrium.edges; }));
    e.push_back(
        list("kinetic", "M_values", [](RunConfig& c) -> std::vector<double>& { return c.kinetic.equilibrium.values; }));
    e.push_back(number("kinetic", "lambda0", [](RunConfig& c) -> double& { return c.kinetic.turning.lambda0; }));
    e.push_back(number("kinetic", "a_coef", [](RunConfig& c) -> double& { return c.kinetic.turning.a_coef; }));
    e.push_back(number("kinetic", "b_coef", [](RunConfig& c) -> double& { return c.kinetic.turning.b_coef; }));
    e.push_back(number("kinetic", "epsilon", [](RunConfig& c) -> double& { return c.kinetic.turning.epsilon; }));
    e.push_back(integer("kinetic", "particles", [](RunConfig& c) -> long& { return c.kinetic.particles; }));
    e.push_back(number("kinetic", "t_end", [](RunConfig& c) -> double& { return c.kinetic.t_end; }));
    e.push_back(number("kinetic", "x0", [](RunConfig& c) -> double& { return c.kinetic.x0; }));
    return e;
  }();
  return entries;
}

void require(bool present, const std::string& section, const std::string& key, const std::string& why) {
  if (!present) throw ConfigError("missing required key [" + section + "] " + key + " (" + why + ")");
}

}  // namespace

std::string to_string(RunMode mode) { return name_of(kModeNames, mode); }

RunMode run_mode_from_string(const std::string& name) { return value_of(kModeNames, "run mode", name); }

RunConfig parse_config(const std::string& text) {
  std::map<std::pair<std::string, std::string>, const Entry*> index;
  std::set<std::string> sections;
  for (const Entry& e : schema()) {
    index[{e.section, e.key}] = &e;
    sections.insert(e.section);
  }

  RunConfig config;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where_line = "line " + std::to_string(line_no);
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where_line + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ConfigError(where_line + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where_line + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where_line + ": key '" + key + "' outside any section");
    const auto it = index.find({section, key});
    if (it == index.end()) throw ConfigError(where_line + ": unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert({section, key}).second) {
      throw ConfigError(where_line + ": duplicate key '" + key + "' in [" + section + "]");
    }
    it->second->set(config, "[" + section + "] " + key, value);
  }
  validate(config);
  return config;
}

void validate(RunConfig& config) {
  config.warnings.clear();
  const Grid1D grid = config.grid();
  ModelParams& m = config.model;

  if (m.diffusion.form == DiffusionForm::tabulated) {
    require(!m.diffusion.nodes.empty(), "model.diffusion", "nodes", "form = tabulated");
  }
  if (m.growth.form == GrowthForm::tabulated) {
    require(!m.growth.table.x.empty(), "model.growth", "table_h", "form = tabulated");
    require(!m.growth.table.y.empty(), "model.growth", "table_mu", "form = tabulated");
  }
  if (m.source.form == SourceForm::tabulated) {
    require(!m.source.table.u.empty(), "model.source", "table_u", "form = tabulated");
    require(!m.source.table.h.empty(), "model.source", "table_h", "form = tabulated");
    require(!m.source.table.values.empty(), "model.source", "table_values", "form = tabulated");
  }
  if (config.ic.form == InitialForm::tabulated) require(!config.ic.u_table.empty(), "initial", "u_table", "form = tabulated");
  if (config.ic.h_form == AcidInitialForm::tabulated) {
    require(!config.ic.h_table.empty(), "initial", "h_table", "h_form = tabulated");
  }
  if (config.kinetic.equilibrium.form == EquilibriumDist::Form::tabulated) {
    require(!config.kinetic.equilibrium.edges.empty(), "kinetic", "M_edges", "equilibrium = tabulated");
    require(!config.kinetic.equilibrium.values.empty(), "kinetic", "M_values", "equilibrium = tabulated");
  }

  config.warnings = validate_model(m, grid);
  if (m.kernel.family != KernelFamily::dirac) discretize(m.kernel, grid, m.renormalize_kernel);
  if (transport_only(m.growth, m.source.H)) config.warnings.push_back("mu vanishes: transport-only run");
  eval_initial_u(config.ic, grid);
  eval_initial_h(config.ic, grid, m.source.H);
  config.integrator.validate();

  if (config.output.snapshot_stride < 1) throw ConfigError("[output] snapshot_stride must be >= 1");
  if (config.output.directory.empty()) throw ConfigError("[output] directory must not be empty");
  if (config.stability.z_max < 1) throw ConfigError("[stability] z_max must be >= 1");

  const KineticConfig& k = config.kinetic;
  k.velocities.validate();
  k.equilibrium.validate(k.velocities);
  k.turning.validate();
  if (k.particles < 1) throw ConfigError("[kinetic] particles must be >= 1");
  if (!(k.t_end >= 0.0)) throw ConfigError("[kinetic] t_end must be nonnegative");
  if (!(std::abs(k.x0) < config.half_length)) throw ConfigError("[kinetic] x0 must lie inside the domain");
}

std::string echo_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const Entry& e : schema()) {
    if (e.section != section) {
      if (!section.empty()) out << '\n';
      section = e.section;
      out << '[' << section << "]\n";
    }
    out << e.key << " = " << e.get(config) << '\n';
  }
  return out.str();
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace invasion
