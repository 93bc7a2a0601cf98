// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cardsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cardsim/errors.hpp"
#include "cardsim/numfmt.hpp"
#include "json.hpp"

namespace cardsim {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Policies

std::string Policy::name() const {
  switch (kind) {
    case Kind::kCard:
      return "card";
    case Kind::kServerOnly:
      return "server-only";
    case Kind::kDeviceOnly:
      return "device-only";
    case Kind::kFixedCut:
      return "cut:" + std::to_string(cut);
    case Kind::kFixedFreq:
      return "freq:" + format_double(freq_hz);
    case Kind::kFixedCutFreq:
      return "cut:" + std::to_string(cut) + "@freq:" + format_double(freq_hz);
  }
  return "card";
}

namespace {

std::uint32_t parse_cut(std::string_view s, std::string_view whole) {
  std::uint32_t v = 0;
  std::size_t used = 0;
  try {
    const unsigned long parsed = std::stoul(std::string(s), &used);
    if (used != s.size() || parsed > 0xffffffffUL) throw std::out_of_range("");
    v = static_cast<std::uint32_t>(parsed);
  } catch (const std::logic_error&) {
    throw ValidationError("policy '" + std::string(whole) + "': bad cut layer");
  }
  return v;
}

double parse_freq(std::string_view s, std::string_view whole) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(std::string(s), &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used != s.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError("policy '" + std::string(whole) + "': bad frequency");
  }
  return v;
}

}  // namespace

Policy parse_policy(std::string_view text) {
  if (text == "card") return Policy::card();
  if (text == "server-only") return Policy::server_only();
  if (text == "device-only") return Policy::device_only();
  const auto at = text.find('@');
  if (at != std::string_view::npos) {
    const auto c = text.substr(0, at);
    const auto f = text.substr(at + 1);
    if (c.substr(0, 4) == "cut:" && f.substr(0, 5) == "freq:") {
      return Policy::fixed(parse_cut(c.substr(4), text), parse_freq(f.substr(5), text));
    }
  } else if (text.substr(0, 4) == "cut:") {
    return Policy::fixed_cut(parse_cut(text.substr(4), text));
  } else if (text.substr(0, 5) == "freq:") {
    return Policy::fixed_freq(parse_freq(text.substr(5), text));
  }
  throw ValidationError("unknown policy '" + std::string(text) +
                        "' (expected card, server-only, device-only, cut:N, "
                        "freq:HZ or cut:N@freq:HZ)");
}

std::vector<Policy> parse_policy_list(std::string_view text) {
  std::vector<Policy> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) throw ValidationError("empty entry in policy list");
    out.push_back(parse_policy(item));
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  if (devices.empty()) throw ValidationError("devices: at least one device required");
  if (rounds < 1) throw ValidationError("rounds: must be >= 1");
  if (local_epochs < 1) throw ValidationError("local_epochs: must be >= 1");
  if (!(compression_ratio > 0.0 && compression_ratio <= 1.0)) {
    throw ValidationError("compression_ratio: must be in (0, 1]");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw ValidationError("weight: must be in [0, 1]");
  }
  if (profile.num_layers() == 0) throw ValidationError("profile: missing");
  if (mapping_table.rows().empty()) throw ValidationError("channel.mapping_table: empty");
  try {
    server.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("server: ") + e.what());
  }
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const std::string where = "devices[" + std::to_string(i) + "]";
    try {
      devices[i].spec.validate();
      devices[i].channel.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    try {
      f_min_for_device(devices[i].spec, server);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(where + ": " + e.what());
    }
  }
  validate_policies(policies);
}

void Scenario::validate_policies(const std::vector<Policy>& list) const {
  const std::uint32_t I = profile.num_layers();
  for (const auto& p : list) {
    if ((p.kind == Policy::Kind::kFixedCut || p.kind == Policy::Kind::kFixedCutFreq) &&
        p.cut > I) {
      throw ValidationError("policies: '" + p.name() + "' cut exceeds " +
                            std::to_string(I) + " layers");
    }
    if (p.kind == Policy::Kind::kFixedFreq || p.kind == Policy::Kind::kFixedCutFreq) {
      if (p.freq_hz > server.max_freq_hz) {
        throw ValidationError("policies: '" + p.name() +
                              "' frequency exceeds the server maximum");
      }
      for (std::size_t i = 0; i < devices.size(); ++i) {
        if (p.freq_hz < f_min_for_device(devices[i].spec, server)) {
          throw ValidationError("policies: '" + p.name() + "' frequency is below F_min of devices[" +
                                std::to_string(i) + "]");
        }
      }
    }
  }
}

RoundCostInputs Scenario::inputs_for(std::uint32_t device,
                                     const ChannelRealization& channel) const {
  if (device >= devices.size()) {
    throw RangeError("device index " + std::to_string(device) + " out of range");
  }
  return RoundCostInputs{profile,      devices[device].spec, server,
                         channel,      local_epochs,         compression_ratio,
                         weight};
}

Scenario builtin_reference_scenario(ChannelState state) {
  Scenario s;
  s.name = "reference-fleet";
  s.server = ServerSpec{"Nvidia RTX 4060Ti", 2.46e9, 2.0, 3072.0, 1e-25};
  struct Row {
    const char* label;
    double ghz;
    double cores;
  };
  static constexpr Row kRows[] = {
      {"Device 1 (Jetson AGX Orin)", 1.3, 2048},
      {"Device 2 (Jetson AGX Orin)", 1.0, 2048},
      {"Device 3 (Jetson AGX Orin)", 0.7, 1792},
      {"Device 4 (Jetson Orin NX)", 0.7, 1024},
      {"Device 5 (Jetson Nano)", 0.5, 512},
  };
  ChannelConfig channel;
  channel.pathloss_exponent = pathloss_exponent(state);
  for (const auto& r : kRows) {
    s.devices.push_back({DeviceSpec{r.label, r.ghz * 1e9, 2.0, r.cores}, channel});
  }
  s.model = default_llama_shape();
  s.profile = make_profile(*s.model);
  s.local_epochs = 5;
  s.compression_ratio = 0.1;
  s.weight = 0.2;
  s.rounds = 100;
  s.seed = 42;
  s.policies = {Policy::card(), Policy::server_only(), Policy::device_only()};
  return s;
}

void set_pathloss_exponent(Scenario& s, double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw ValidationError("pathloss_exponent must be > 0");
  }
  for (auto& d : s.devices) d.channel.pathloss_exponent = exponent;
}

void set_batch_size(Scenario& s, std::uint32_t batch_size) {
  if (!s.model) {
    throw ValidationError(
        "batch size can only change for profiles derived from profile.model");
  }
  if (batch_size == 0) throw ValidationError("batch_size must be >= 1");
  s.model->batch_size = batch_size;
  s.profile = make_profile(*s.model);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

// Walks one JSON object, tracking consumed keys so leftovers can be reported
// with their full path.
class Reader {
 public:
  Reader(const json& obj, std::string path, const LoadOptions& opts,
         std::vector<std::string>* warnings)
      : obj_(obj), path_(std::move(path)), opts_(opts), warnings_(warnings) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = {}) {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail(at(key), "required field missing");
    }
    const json& v = raw(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    return v.get<double>();
  }

  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0) || !std::isfinite(v)) fail(at(key), "must be > 0");
    return v;
  }

  const json& required(const std::string& key) {
    if (!has(key)) fail(at(key), "required field missing");
    return raw(key);
  }

  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback = {}) {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail(at(key), "required field missing");
    }
    const json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) fail(at(key), "must be >= 0");
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d < 1.8446744073709552e19 && std::floor(d) == d) {
        return static_cast<std::uint64_t>(d);
      }
    }
    fail(at(key), "expected a non-negative integer");
  }

  std::uint32_t count32(const std::string& key, std::optional<std::uint32_t> fallback = {}) {
    const std::uint64_t v = count(key, fallback);
    if (v > 0xffffffffULL) fail(at(key), "too large");
    return static_cast<std::uint32_t>(v);
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = {}) {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail(at(key), "required field missing");
    }
    const json& v = raw(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<std::uint64_t> counts(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail(at(key), "expected an array");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned()) {
        fail(at(key) + "[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
      out.push_back(v[i].get<std::uint64_t>());
    }
    return out;
  }

  /// Reports keys that were never read.
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      const std::string msg = at(it.key()) + ": unknown field";
      if (opts_.strict) throw ValidationError(msg);
      if (warnings_) warnings_->push_back(msg);
    }
  }

  const std::string& path() const { return path_; }
  const LoadOptions& options() const { return opts_; }
  std::vector<std::string>* warnings() const { return warnings_; }

 private:
  const json& obj_;
  std::string path_;
  const LoadOptions& opts_;
  std::vector<std::string>* warnings_;
  std::set<std::string> seen_;
};

template <typename F>
auto with_path(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

DeviceSpec read_device(Reader& r) {
  DeviceSpec d;
  d.label = r.text("label", std::string{});
  d.gpu_freq_hz = r.positive("gpu_freq_hz");
  d.flops_per_cycle = r.positive("flops_per_cycle");
  d.core_count = r.positive("core_count");
  return d;
}

ServerSpec read_server(Reader& r) {
  ServerSpec s;
  s.label = r.text("label", std::string{});
  s.max_freq_hz = r.positive("max_freq_hz");
  s.flops_per_cycle = r.positive("flops_per_cycle");
  s.core_count = r.positive("core_count");
  s.power_coeff = r.positive("power_coeff");
  return s;
}

// Fields absent from the object keep the values in `base`.
ChannelConfig read_channel(Reader& r, ChannelConfig base) {
  base.bandwidth_hz = r.number("bandwidth_hz", base.bandwidth_hz);
  base.uplink_tx_power_dbm = r.number("uplink_tx_power_dbm", base.uplink_tx_power_dbm);
  base.downlink_tx_power_dbm =
      r.number("downlink_tx_power_dbm", base.downlink_tx_power_dbm);
  base.noise_psd_dbm_hz = r.number("noise_psd_dbm_hz", base.noise_psd_dbm_hz);
  base.distance_m = r.number("distance_m", base.distance_m);
  base.reference_pathloss_db =
      r.number("reference_pathloss_db", base.reference_pathloss_db);
  if (r.has("state") && r.has("pathloss_exponent")) {
    Reader::fail(r.at("state"), "give either state or pathloss_exponent, not both");
  }
  if (r.has("state")) {
    const std::string s = r.text("state");
    base.pathloss_exponent =
        with_path(r.at("state"), [&] { return pathloss_exponent(parse_channel_state(s)); });
  } else {
    base.pathloss_exponent = r.number("pathloss_exponent", base.pathloss_exponent);
  }
  if (r.has("fading")) {
    const std::string f = r.text("fading");
    if (f == "rayleigh") {
      base.fading = Fading::kRayleigh;
    } else if (f == "none") {
      base.fading = Fading::kNone;
    } else {
      Reader::fail(r.at("fading"), "expected 'rayleigh' or 'none'");
    }
  }
  with_path(r.path(), [&] {
    base.validate();
    return 0;
  });
  return base;
}

TransformerShape read_model(Reader& r) {
  TransformerShape s;
  s.num_layers = r.count32("num_layers", s.num_layers);
  s.hidden_dim = r.count("hidden_dim", s.hidden_dim);
  s.ffn_dim = r.count("ffn_dim", s.ffn_dim);
  s.num_heads = r.count32("num_heads", s.num_heads);
  s.num_kv_heads = r.count32("num_kv_heads", s.num_kv_heads);
  s.vocab_size = r.count("vocab_size", s.vocab_size);
  s.batch_size = r.count32("batch_size", s.batch_size);
  s.seq_len = r.count32("seq_len", s.seq_len);
  s.lora_rank = r.count32("lora_rank", s.lora_rank);
  s.lora_targets_per_layer = r.count32("lora_targets_per_layer", s.lora_targets_per_layer);
  s.activation_bits = r.count32("activation_bits", s.activation_bits);
  s.adapter_param_bits = r.count32("adapter_param_bits", s.adapter_param_bits);
  return s;
}

void read_profile(Reader& r, Scenario& out) {
  const auto& opts = r.options();
  if (r.has("model")) {
    Reader m(r.raw("model"), r.at("model"), opts, r.warnings());
    out.model = read_model(m);
    m.finish();
    out.profile = with_path(r.at("model"), [&] { return make_profile(*out.model); });
    return;
  }
  out.model.reset();
  const Flops embedding = r.count("flops_embedding", 0);
  const Flops head = r.count("flops_head", 0);
  const std::uint32_t rank = r.count32("lora_rank", 0);
  if (r.has("layer_flops")) {
    auto layers = r.counts("layer_flops");
    auto smashed = r.counts("smashed_bits_at_cut");
    auto grad = r.counts("grad_bits_at_cut");
    auto adapter = r.counts("layer_adapter_bits");
    out.profile = with_path(r.path(), [&] {
      return LlmProfile::custom(embedding, std::move(layers), head, std::move(smashed),
                                std::move(grad), std::move(adapter), rank);
    });
    return;
  }
  const std::uint32_t layers = r.count32("num_layers");
  const Flops per_layer = r.count("flops_per_layer");
  const Bits smashed = r.count("smashed_bits_per_layer");
  const Bits grad = r.count("grad_bits_per_layer", smashed);
  const Bits adapter = r.count("adapter_bits_per_layer");
  out.profile = with_path(r.path(), [&] {
    return LlmProfile::uniform(layers, embedding, per_layer, head, smashed, grad,
                               adapter, rank);
  });
}

MappingTable read_table(const json& v, const std::string& where,
                        const std::string& base_dir) {
  if (v.is_string()) {
    std::filesystem::path p(v.get<std::string>());
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    try {
      return MappingTable::load_csv(p.string());
    } catch (const Error& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (!v.is_array()) Reader::fail(where, "expected a CSV path or an array of [snr_db, efficiency]");
  std::vector<MappingRow> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      Reader::fail(where + "[" + std::to_string(i) + "]", "expected [snr_db, efficiency]");
    }
    rows.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return with_path(where, [&] { return MappingTable(std::move(rows)); });
}

json write_channel(const ChannelConfig& c) {
  return json{{"bandwidth_hz", c.bandwidth_hz},
              {"uplink_tx_power_dbm", c.uplink_tx_power_dbm},
              {"downlink_tx_power_dbm", c.downlink_tx_power_dbm},
              {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
              {"distance_m", c.distance_m},
              {"pathloss_exponent", c.pathloss_exponent},
              {"reference_pathloss_db", c.reference_pathloss_db},
              {"fading", c.fading == Fading::kRayleigh ? "rayleigh" : "none"}};
}

json write_profile(const Scenario& s) {
  if (s.model) {
    const auto& m = *s.model;
    return json{{"model",
                 {{"num_layers", m.num_layers},
                  {"hidden_dim", m.hidden_dim},
                  {"ffn_dim", m.ffn_dim},
                  {"num_heads", m.num_heads},
                  {"num_kv_heads", m.num_kv_heads},
                  {"vocab_size", m.vocab_size},
                  {"batch_size", m.batch_size},
                  {"seq_len", m.seq_len},
                  {"lora_rank", m.lora_rank},
                  {"lora_targets_per_layer", m.lora_targets_per_layer},
                  {"activation_bits", m.activation_bits},
                  {"adapter_param_bits", m.adapter_param_bits}}}};
  }
  const auto& p = s.profile;
  json out{{"flops_embedding", p.flops_embedding()},
           {"flops_head", p.flops_head()},
           {"lora_rank", p.lora_rank()}};
  if (p.is_uniform()) {
    out["num_layers"] = p.num_layers();
    out["flops_per_layer"] = p.layer_flops().front();
    out["smashed_bits_per_layer"] = p.smashed_bits_at_cut().front();
    out["grad_bits_per_layer"] = p.grad_bits_at_cut().front();
    out["adapter_bits_per_layer"] = p.layer_adapter_bits().front();
  } else {
    out["layer_flops"] = p.layer_flops();
    out["smashed_bits_at_cut"] = p.smashed_bits_at_cut();
    out["grad_bits_at_cut"] = p.grad_bits_at_cut();
    out["layer_adapter_bits"] = p.layer_adapter_bits();
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir,
                        const LoadOptions& opts, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("parse error: ") + e.what());
  }
  Reader root(doc, "", opts, warnings);
  Scenario s;
  s.name = root.text("name", std::string{});
  s.seed = root.count("seed", s.seed);
  s.rounds = root.count32("rounds", s.rounds);
  s.local_epochs = root.count32("local_epochs", s.local_epochs);
  s.compression_ratio = root.number("compression_ratio", s.compression_ratio);
  s.weight = root.number("weight", s.weight);

  if (root.has("policies")) {
    const json& v = root.raw("policies");
    if (!v.is_array()) Reader::fail("policies", "expected an array of policy names");
    s.policies.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string where = "policies[" + std::to_string(i) + "]";
      if (!v[i].is_string()) Reader::fail(where, "expected a string");
      s.policies.push_back(with_path(where, [&] { return parse_policy(v[i].get<std::string>()); }));
    }
  } else {
    s.policies = {Policy::card(), Policy::server_only(), Policy::device_only()};
  }

  {
    Reader r(root.required("server"), "server", opts, warnings);
    s.server = read_server(r);
    r.finish();
  }

  ChannelConfig channel_defaults;
  if (root.has("channel")) {
    Reader r(root.raw("channel"), "channel", opts, warnings);
    if (r.has("mapping_table")) {
      s.mapping_table = read_table(r.raw("mapping_table"), "channel.mapping_table", base_dir);
    }
    channel_defaults = read_channel(r, channel_defaults);
    r.finish();
  }

  const json& devs = root.required("devices");
  if (!devs.is_array()) Reader::fail("devices", "expected an array");
  for (std::size_t i = 0; i < devs.size(); ++i) {
    const std::string where = "devices[" + std::to_string(i) + "]";
    Reader r(devs[i], where, opts, warnings);
    DeviceEntry entry;
    entry.spec = read_device(r);
    entry.channel = channel_defaults;
    if (r.has("channel")) {
      Reader c(r.raw("channel"), where + ".channel", opts, warnings);
      entry.channel = read_channel(c, channel_defaults);
      c.finish();
    }
    r.finish();
    s.devices.push_back(std::move(entry));
  }

  if (root.has("profile")) {
    Reader r(root.raw("profile"), "profile", opts, warnings);
    read_profile(r, s);
    r.finish();
  } else {
    s.model = default_llama_shape();
    s.profile = make_profile(*s.model);
  }
  root.finish();
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path, const LoadOptions& opts,
                       std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_scenario(buf.str(), base, opts, warnings);
}

std::string to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["seed"] = s.seed;
  doc["rounds"] = s.rounds;
  doc["local_epochs"] = s.local_epochs;
  doc["compression_ratio"] = s.compression_ratio;
  doc["weight"] = s.weight;
  json policies = json::array();
  for (const auto& p : s.policies) policies.push_back(p.name());
  doc["policies"] = policies;
  doc["server"] = {{"label", s.server.label},
                   {"max_freq_hz", s.server.max_freq_hz},
                   {"flops_per_cycle", s.server.flops_per_cycle},
                   {"core_count", s.server.core_count},
                   {"power_coeff", s.server.power_coeff}};
  json table = json::array();
  for (const auto& row : s.mapping_table.rows()) {
    table.push_back({row.min_snr_db, row.spectral_efficiency});
  }
  doc["channel"] = {{"mapping_table", table}};
  json devices = json::array();
  for (const auto& d : s.devices) {
    devices.push_back({{"label", d.spec.label},
                       {"gpu_freq_hz", d.spec.gpu_freq_hz},
                       {"flops_per_cycle", d.spec.flops_per_cycle},
                       {"core_count", d.spec.core_count},
                       {"channel", write_channel(d.channel)}});
  }
  doc["devices"] = devices;
  doc["profile"] = write_profile(s);
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scenario '" + path + "'");
  out << to_json(s);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace cardsim
