#include "mcrn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mcrn {

namespace {

using nlohmann::json;

constexpr double kHighNoise = 2.5e19;
constexpr double kLowNoise = 1.0e19;

// Walks one JSON object, remembering its path and which keys were consumed.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void number(const std::string& key, T& out) {
    const json* v = get(key);
    if (!v) return;
    if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
      out = v->get<T>();
    } else {
      if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
      out = v->get<T>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    out = v->get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
    out = v->get<std::string>();
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& key, const char* message) {
  if (!ok) throw ConfigError(key, message);
}

ChannelParams read_channel(const json& j, const std::string& path, ChannelParams c) {
  Reader r(j, path);
  r.number("c_noise", c.c_noise);
  r.number("delta_c", c.delta_c);
  r.number("k_plus", c.k_plus);
  r.number("k_minus", c.k_minus);
  r.number("n_receptors", c.n_receptors);
  r.finish();
  check(c.c_noise >= 0.0, r.key_path("c_noise"), "must be >= 0");
  check(c.delta_c > 0.0, r.key_path("delta_c"), "must be > 0");
  check(c.k_plus > 0.0, r.key_path("k_plus"), "must be > 0");
  check(c.k_minus > 0.0, r.key_path("k_minus"), "must be > 0");
  check(c.n_receptors >= 1, r.key_path("n_receptors"), "must be >= 1");
  return c;
}

DetectorKind parse_kind(const std::string& s, const std::string& key) {
  if (s == "threshold") return DetectorKind::Threshold;
  if (s == "map-bm") return DetectorKind::MapBm;
  if (s == "taylor-crn") return DetectorKind::TaylorCrn;
  if (s == "lc-crn") return DetectorKind::LcCrn;
  throw ConfigError(key, "unknown detector type '" + s + "'");
}

SamplingPolicy read_sampling(const json& j, const std::string& path, SamplingPolicy p) {
  Reader r(j, path);
  r.number("burn_in_holding_times", p.burn_in_holding_times);
  r.number("interval_holding_times", p.interval_holding_times);
  r.number("m", p.m);
  r.finish();
  check(p.burn_in_holding_times >= 0.0, r.key_path("burn_in_holding_times"), "must be >= 0");
  check(p.interval_holding_times > 0.0, r.key_path("interval_holding_times"), "must be > 0");
  check(p.m >= 1, r.key_path("m"), "must be >= 1");
  return p;
}

}  // namespace

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Threshold: return "threshold";
    case DetectorKind::MapBm: return "map-bm";
    case DetectorKind::TaylorCrn: return "taylor-crn";
    case DetectorKind::LcCrn: return "lc-crn";
  }
  return "?";
}

LcDetectorState OnlineConfig::initial_state(int n_receptors) const {
  const int total = n_w_total.value_or(min_reservoir(n_receptors, k_on, k_off));
  LcDetectorState st{std::min(initial_n_w_on, total), total, k_on, k_off};
  st.validate();
  return st;
}

int NoiseSchedule::total_pilots() const {
  int total = 0;
  for (const auto& p : phases) total += p.pilots;
  return total;
}

std::size_t NoiseSchedule::phase_of_pilot(int l) const {
  int end = 0;
  for (std::size_t k = 0; k < phases.size(); ++k) {
    end += phases[k].pilots;
    if (l <= end) return k;
  }
  return phases.empty() ? 0 : phases.size() - 1;
}

void NoiseSchedule::validate() const {
  if (phases.empty()) throw std::invalid_argument("noise schedule needs at least one phase");
  for (const auto& p : phases) {
    if (p.pilots < 1) throw std::invalid_argument("noise schedule durations must be positive");
    if (p.c_noise < 0.0) throw std::invalid_argument("noise schedule c_noise must be >= 0");
  }
}

ChannelParams standard_channel(int n_receptors, double c_noise) {
  return {c_noise, 1.5e20, 2e-19, 20.0, n_receptors};
}

ExperimentConfig ExperimentConfig::paper_defaults() {
  ExperimentConfig cfg;
  for (int nr : {30, 50}) {
    cfg.scenarios.push_back({"nr" + std::to_string(nr) + "_high", standard_channel(nr, kHighNoise)});
    cfg.scenarios.push_back({"nr" + std::to_string(nr) + "_low", standard_channel(nr, kLowNoise)});
  }
  cfg.time_variant.channel = standard_channel(30, kLowNoise);
  cfg.time_variant.channel.delta_c = 1.5e20 - 1.0e19;
  cfg.time_variant.schedule.phases = {{500, kLowNoise}, {500, kHighNoise}, {500, kLowNoise}};
  return cfg;
}

ExperimentConfig ExperimentConfig::ci_profile() {
  ExperimentConfig cfg = paper_defaults();
  cfg.n_replicates = 5;
  cfg.scenarios.clear();
  for (int nr : {10, 20}) {
    cfg.scenarios.push_back({"nr" + std::to_string(nr) + "_high", standard_channel(nr, kHighNoise)});
    cfg.scenarios.push_back({"nr" + std::to_string(nr) + "_low", standard_channel(nr, kLowNoise)});
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  check(n_replicates >= 1, "n_replicates", "must be >= 1");
  check(max_errors >= 1, "max_errors", "must be >= 1");
  check(symbol_cap >= 1, "symbol_cap", "must be >= 1");
  check(eval_every >= 1, "training.eval_every", "must be >= 1");
  check(!scenarios.empty(), "scenarios", "at least one scenario is required");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string key = "scenarios[" + std::to_string(i) + "]";
    try {
      LikelihoodModel::from_channel(scenarios[i].channel);
    } catch (const std::exception& e) {
      throw ConfigError(key + ".channel", e.what());
    }
  }
  try {
    training.validate();
  } catch (const std::exception& e) {
    throw ConfigError("training", e.what());
  }
  try {
    time_variant.schedule.validate();
  } catch (const std::exception& e) {
    throw ConfigError("time_variant.schedule", e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg = ExperimentConfig::paper_defaults();
  Reader r(root, "");

  r.number("seed", cfg.seed);
  r.number("n_replicates", cfg.n_replicates);
  r.number("max_errors", cfg.max_errors);
  r.number("symbol_cap", cfg.symbol_cap);
  r.number("threads", cfg.threads);
  std::string out_dir = cfg.output_dir.string();
  r.string("output_dir", out_dir);
  cfg.output_dir = out_dir;

  if (const json* sc = r.get("scenarios")) {
    check(sc->is_array(), "scenarios", "expected an array");
    cfg.scenarios.clear();
    for (std::size_t i = 0; i < sc->size(); ++i) {
      const std::string path = "scenarios[" + std::to_string(i) + "]";
      Reader s((*sc)[i], path);
      Scenario scenario{"scenario" + std::to_string(i), standard_channel(30, kHighNoise)};
      s.string("name", scenario.name);
      if (const json* ch = s.get("channel")) scenario.channel = read_channel(*ch, path + ".channel", scenario.channel);
      s.finish();
      cfg.scenarios.push_back(std::move(scenario));
    }
  }

  if (const json* d = r.get("detector")) {
    Reader dr(*d, "detector");
    std::string type = to_string(cfg.detector.kind);
    dr.string("type", type);
    cfg.detector.kind = parse_kind(type, "detector.type");
    dr.number("w_xy", cfg.detector.w_xy);
    dr.number("m_samples", cfg.detector.m_samples);
    dr.number("k_scale", cfg.detector.k_scale);
    dr.number("k_on", cfg.detector.k_on);
    dr.number("k_off", cfg.detector.k_off);
    dr.finish();
    check(cfg.detector.w_xy > 0.0, "detector.w_xy", "must be > 0");
    check(cfg.detector.m_samples >= 0, "detector.m_samples", "must be >= 0");
    check(cfg.detector.k_scale > 0.0, "detector.k_scale", "must be > 0");
    check(cfg.detector.k_on > 0.0, "detector.k_on", "must be > 0");
    check(cfg.detector.k_off > 0.0, "detector.k_off", "must be > 0");
  }

  if (const json* s = r.get("sampling")) cfg.sampling = read_sampling(*s, "sampling", cfg.sampling);

  if (const json* t = r.get("training")) {
    Reader tr(*t, "training");
    tr.number("n_data_samples", cfg.training.n_data_samples);
    tr.number("n_gibbs_samples", cfg.training.n_gibbs_samples);
    tr.number("n_steps", cfg.training.n_steps);
    tr.number("eval_every", cfg.eval_every);
    if (const json* lr = tr.get("lr_schedule")) {
      check(lr->is_array() && !lr->empty(), "training.lr_schedule", "expected a non-empty array");
      cfg.training.schedule.pieces.clear();
      for (std::size_t i = 0; i < lr->size(); ++i) {
        const std::string path = "training.lr_schedule[" + std::to_string(i) + "]";
        Reader pr((*lr)[i], path);
        LearningRateSchedule::Piece piece{0, 0.0};
        check(pr.get("until_step") && pr.get("rate"), path, "needs 'until_step' and 'rate'");
        pr.number("until_step", piece.end_step);
        pr.number("rate", piece.rate);
        pr.finish();
        check(piece.rate >= 0.0, path + ".rate", "must be >= 0");
        cfg.training.schedule.pieces.push_back(piece);
      }
    }
    tr.finish();
    check(cfg.training.n_data_samples >= 1, "training.n_data_samples", "must be >= 1");
    check(cfg.training.n_gibbs_samples >= 1, "training.n_gibbs_samples", "must be >= 1");
    check(cfg.training.n_steps >= 0, "training.n_steps", "must be >= 0");
  }

  if (const json* o = r.get("online")) {
    Reader orr(*o, "online");
    orr.number("n_pilots", cfg.online.n_pilots);
    orr.number("k_on", cfg.online.k_on);
    orr.number("k_off", cfg.online.k_off);
    if (const json* nw = orr.get("n_w_total"); nw && !nw->is_null()) {
      check(nw->is_number_integer(), "online.n_w_total", "expected an integer or null");
      cfg.online.n_w_total = nw->get<int>();
      check(*cfg.online.n_w_total >= 0, "online.n_w_total", "must be >= 0");
    }
    orr.number("initial_n_w_on", cfg.online.initial_n_w_on);
    orr.boolean("use_learning_crn", cfg.online.options.use_learning_crn);
    orr.number("k_u1", cfg.online.options.rates.k_u1);
    orr.number("k_u2", cfg.online.options.rates.k_u2);
    orr.number("update_interval", cfg.online.options.update_interval);
    orr.finish();
    check(cfg.online.n_pilots >= 0, "online.n_pilots", "must be >= 0");
    check(cfg.online.k_on > 0.0, "online.k_on", "must be > 0");
    check(cfg.online.k_off > 0.0, "online.k_off", "must be > 0");
    check(cfg.online.initial_n_w_on >= 0, "online.initial_n_w_on", "must be >= 0");
    check(cfg.online.options.rates.k_u1 > 0.0, "online.k_u1", "must be > 0");
    check(cfg.online.options.rates.k_u2 > 0.0, "online.k_u2", "must be > 0");
    check(cfg.online.options.update_interval > 0.0, "online.update_interval", "must be > 0");
  }

  if (const json* tv = r.get("time_variant")) {
    Reader tr(*tv, "time_variant");
    if (const json* ch = tr.get("channel")) {
      cfg.time_variant.channel = read_channel(*ch, "time_variant.channel", cfg.time_variant.channel);
    }
    if (const json* sch = tr.get("schedule")) {
      check(sch->is_array() && !sch->empty(), "time_variant.schedule", "expected a non-empty array");
      cfg.time_variant.schedule.phases.clear();
      for (std::size_t i = 0; i < sch->size(); ++i) {
        const std::string path = "time_variant.schedule[" + std::to_string(i) + "]";
        Reader pr((*sch)[i], path);
        NoisePhase phase;
        check(pr.get("pilots") && pr.get("c_noise"), path, "needs 'pilots' and 'c_noise'");
        pr.number("pilots", phase.pilots);
        pr.number("c_noise", phase.c_noise);
        pr.finish();
        check(phase.pilots >= 1, path + ".pilots", "must be >= 1");
        check(phase.c_noise >= 0.0, path + ".c_noise", "must be >= 0");
        cfg.time_variant.schedule.phases.push_back(phase);
      }
    }
    tr.finish();
  }

  r.finish();
  cfg.online.options.sampling = cfg.sampling;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace mcrn
