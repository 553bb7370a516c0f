#include "spinrf/checkpoint.hpp"

#include <openssl/sha.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

#include "spinrf/errors.hpp"

namespace spinrf {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'S', 'P', 'I', 'N', 'R', 'F', 'C', 'K'};
constexpr std::size_t kDigestSize = SHA256_DIGEST_LENGTH;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}
std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  }
  return v;
}

std::array<unsigned char, kDigestSize> sha256(const std::string& data, std::size_t n) {
  std::array<unsigned char, kDigestSize> d{};
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), n, d.data());
  return d;
}

// ---- model <-> raw ----

RawArray from_matrix(std::string name, const Matrix& m) {
  return {std::move(name), m.rows(), m.cols(), {m.flat().begin(), m.flat().end()}};
}
RawArray from_vector(std::string name, const std::vector<double>& v) {
  return {std::move(name), 1, v.size(), v};
}

const RawArray& find(const RawCheckpoint& raw, const std::string& name) {
  for (const auto& a : raw.arrays) {
    if (a.name == name) return a;
  }
  throw StructuralError("checkpoint: missing array '" + name + "'");
}
Matrix to_matrix(const RawArray& a) {
  Matrix m(a.rows, a.cols);
  std::copy(a.values.begin(), a.values.end(), m.flat().begin());
  return m;
}

json resonator_json(const ResonatorParams& p) { return {{"alpha", p.alpha}, {"k_sd", p.k_sd}}; }
ResonatorParams resonator_from(const json& j) {
  return {j.at("alpha").get<double>(), j.at("k_sd").get<double>()};
}
json oscillator_json(const OscillatorParams& o) {
  return {{"i_th", o.i_th},           {"q_nl", o.q_nl},
          {"a_scale", o.a_scale},     {"r_ohm", o.r_ohm},
          {"clamp_factor", o.clamp_factor}, {"shape_tmr_factor", o.shape_tmr_factor}};
}
OscillatorParams oscillator_from(const json& j) {
  OscillatorParams o;
  o.i_th = j.at("i_th").get<double>();
  o.q_nl = j.at("q_nl").get<double>();
  o.a_scale = j.at("a_scale").get<double>();
  o.r_ohm = j.at("r_ohm").get<double>();
  o.clamp_factor = j.at("clamp_factor").get<double>();
  o.shape_tmr_factor = j.at("shape_tmr_factor").get<double>();
  return o;
}

json chain_json(const ChainLayerState& s) {
  return {{"chains", s.n_chains()},
          {"resonators", s.n_resonators()},
          {"v_layer_v", s.v_layer},
          {"sign_mode", to_string(s.sign_mode)},
          {"band_hz", {s.band.lo, s.band.hi}},
          {"resonator", resonator_json(s.resonator)}};
}
void add_chain_arrays(RawCheckpoint& raw, const std::string& prefix, const ChainLayerState& s) {
  raw.arrays.push_back(from_matrix(prefix + ".f_res", s.f_res));
  raw.arrays.push_back(from_vector(prefix + ".v_chains", s.v_chains));
}
ChainLayerState chain_from(const json& j, const RawCheckpoint& raw, const std::string& prefix) {
  ChainLayerState s;
  const RawArray& f = find(raw, prefix + ".f_res");
  const RawArray& v = find(raw, prefix + ".v_chains");
  const auto chains = j.at("chains").get<std::size_t>();
  const auto res = j.at("resonators").get<std::size_t>();
  if (f.rows != chains || f.cols != res || v.cols != chains || v.rows != 1) {
    throw StructuralError("checkpoint: " + prefix + " arrays do not match declared shape " +
                          std::to_string(chains) + "x" + std::to_string(res));
  }
  s.f_res = to_matrix(f);
  s.v_chains = v.values;
  s.v_layer = j.at("v_layer_v").get<double>();
  s.sign_mode = sign_mode_from_string(j.at("sign_mode").get<std::string>());
  s.band = {j.at("band_hz").at(0).get<double>(), j.at("band_hz").at(1).get<double>()};
  s.resonator = resonator_from(j.at("resonator"));
  return s;
}

json neuron_json(const NeuronLayerState& n) {
  return {{"size", n.size()}, {"g_m_a_per_v", n.g_m}, {"clamped", n.clamped},
          {"oscillator", oscillator_json(n.osc)}};
}
NeuronLayerState neuron_from(const json& j, const RawCheckpoint& raw, const std::string& prefix) {
  NeuronLayerState n;
  n.g_m = j.at("g_m_a_per_v").get<double>();
  n.clamped = j.at("clamped").get<bool>();
  n.osc = oscillator_from(j.at("oscillator"));
  const RawArray& f = find(raw, prefix + ".emit_freqs");
  if (f.cols != j.at("size").get<std::size_t>()) {
    throw StructuralError("checkpoint: " + prefix + " emission frequencies do not match size");
  }
  n.emit_freqs = f.values;
  return n;
}

json parse_header(const RawCheckpoint& raw) {
  try {
    return json::parse(raw.header_json);
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("checkpoint: unreadable header: ") + e.what());
  }
}

}  // namespace

void write_raw_checkpoint(const std::filesystem::path& path, const RawCheckpoint& raw) {
  json header = json::parse(raw.header_json);
  json arrays = json::array();
  for (const auto& a : raw.arrays) {
    if (a.values.size() != a.rows * a.cols) {
      throw StructuralError("checkpoint: array '" + a.name + "' size does not match its shape");
    }
    arrays.push_back({{"name", a.name}, {"rows", a.rows}, {"cols", a.cols}});
  }
  header["arrays"] = std::move(arrays);
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kCheckpointVersion);
  put_u64(out, header_text.size());
  out += header_text;
  for (const auto& a : raw.arrays) {
    for (double v : a.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  const auto digest = sha256(out, out.size());
  out.append(reinterpret_cast<const char*>(digest.data()), digest.size());

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("checkpoint: cannot open '" + path.string() + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("checkpoint: write failed for '" + path.string() + "'");
}

RawCheckpoint read_raw_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("checkpoint: cannot open '" + path.string() + "'");
  std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  constexpr std::size_t kFixed = sizeof kMagic + 4 + 8;
  if (in.size() < kFixed + kDigestSize) throw CorruptionError("checkpoint: file truncated");
  if (std::memcmp(in.data(), kMagic, sizeof kMagic) != 0) {
    throw CorruptionError("checkpoint: bad magic, not a spinrf checkpoint");
  }
  const auto version = static_cast<std::uint32_t>(get_le(in, 8, 4));
  if (version != kCheckpointVersion) {
    throw CorruptionError("checkpoint: unsupported format version " + std::to_string(version));
  }
  const std::size_t body = in.size() - kDigestSize;
  const auto expected = sha256(in, body);
  if (std::memcmp(expected.data(), in.data() + body, kDigestSize) != 0) {
    throw CorruptionError("checkpoint: digest mismatch (truncated or corrupted file)");
  }
  const std::uint64_t header_len = get_le(in, 12, 8);
  if (header_len > body - kFixed) throw CorruptionError("checkpoint: header length out of range");

  RawCheckpoint raw;
  raw.header_json = in.substr(kFixed, header_len);
  json header = parse_header(raw);
  std::size_t pos = kFixed + header_len;
  try {
    for (const auto& a : header.at("arrays")) {
      RawArray arr;
      arr.name = a.at("name").get<std::string>();
      arr.rows = a.at("rows").get<std::size_t>();
      arr.cols = a.at("cols").get<std::size_t>();
      const std::size_t n = arr.rows * arr.cols;
      if (n > (body - pos) / 8) throw CorruptionError("checkpoint: array data truncated");
      arr.values.resize(n);
      for (std::size_t i = 0; i < n; ++i, pos += 8) {
        arr.values[i] = std::bit_cast<double>(get_le(in, pos, 8));
      }
      raw.arrays.push_back(std::move(arr));
    }
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("checkpoint: malformed array table: ") + e.what());
  }
  if (pos != body) throw CorruptionError("checkpoint: trailing bytes after array data");
  header.erase("arrays");
  raw.header_json = header.dump();
  return raw;
}

void save_checkpoint(const NetworkModel& model, const std::filesystem::path& path) {
  model.validate();
  RawCheckpoint raw;
  json h;
  h["kind"] = "physical";
  h["units"] = {{"frequency", "Hz"}, {"bias", "V"}, {"weight", "uV/uW"},
                {"transconductance", "A/V"}, {"current", "A"}, {"resistance", "ohm"}};
  h["input_grid"] = {{"f_min_hz", model.input_grid.f_min},
                     {"f_max_hz", model.input_grid.f_max},
                     {"n_bins", model.input_grid.n_bins}};
  h["logit_scale"] = model.logit_scale;
  h["metadata"] = {{"config_hash", model.metadata.config_hash},
                   {"created_unix", model.metadata.created_unix}};
  h["layer1"] = chain_json(model.layer1);
  add_chain_arrays(raw, "layer1", model.layer1);
  if (model.two_layer()) {
    h["hidden"] = neuron_json(*model.hidden);
    raw.arrays.push_back(from_vector("hidden.emit_freqs", model.hidden->emit_freqs));
    h["layer2"] = chain_json(*model.layer2);
    add_chain_arrays(raw, "layer2", *model.layer2);
  }
  if (model.output_neurons) {
    h["output_neurons"] = neuron_json(*model.output_neurons);
    raw.arrays.push_back(from_vector("output_neurons.emit_freqs", model.output_neurons->emit_freqs));
  }
  raw.header_json = h.dump();
  write_raw_checkpoint(path, raw);
}

void save_checkpoint(const EquivalentSoftwareModel& model, const std::filesystem::path& path) {
  model.validate();
  RawCheckpoint raw;
  auto act = [](Activation a) {
    return a == Activation::relu ? "relu" : a == Activation::sigmoid ? "sigmoid" : "identity";
  };
  json h;
  h["kind"] = "software";
  h["hidden_activation"] = act(model.hidden_activation);
  h["output_activation"] = act(model.output_activation);
  raw.arrays.push_back(from_matrix("w1", model.w1));
  raw.arrays.push_back(from_vector("b1", model.b1));
  if (model.two_layer()) {
    raw.arrays.push_back(from_matrix("w2", model.w2));
    raw.arrays.push_back(from_vector("b2", model.b2));
  }
  raw.header_json = h.dump();
  write_raw_checkpoint(path, raw);
}

std::string checkpoint_kind(const std::filesystem::path& path) {
  RawCheckpoint raw = read_raw_checkpoint(path);
  return parse_header(raw).value("kind", "");
}

NetworkModel load_checkpoint(const std::filesystem::path& path) {
  RawCheckpoint raw = read_raw_checkpoint(path);
  json h = parse_header(raw);
  if (h.value("kind", "") != "physical") {
    throw StructuralError("checkpoint: '" + path.string() + "' is not a physical network");
  }
  NetworkModel m;
  try {
    const auto& g = h.at("input_grid");
    m.input_grid.f_min = g.at("f_min_hz").get<double>();
    m.input_grid.f_max = g.at("f_max_hz").get<double>();
    m.input_grid.n_bins = g.at("n_bins").get<std::size_t>();
    m.logit_scale = h.at("logit_scale").get<double>();
    m.metadata.config_hash = h.at("metadata").at("config_hash").get<std::string>();
    m.metadata.created_unix = h.at("metadata").at("created_unix").get<std::int64_t>();
    m.layer1 = chain_from(h.at("layer1"), raw, "layer1");
    if (h.contains("hidden")) {
      m.hidden = neuron_from(h.at("hidden"), raw, "hidden");
      m.layer2 = chain_from(h.at("layer2"), raw, "layer2");
    }
    if (h.contains("output_neurons")) {
      m.output_neurons = neuron_from(h.at("output_neurons"), raw, "output_neurons");
    }
  } catch (const json::exception& e) {
    throw StructuralError(std::string("checkpoint: header missing fields: ") + e.what());
  }
  m.validate();
  return m;
}

EquivalentSoftwareModel load_software_checkpoint(const std::filesystem::path& path) {
  RawCheckpoint raw = read_raw_checkpoint(path);
  json h = parse_header(raw);
  if (h.value("kind", "") != "software") {
    throw StructuralError("checkpoint: '" + path.string() + "' is not a software network");
  }
  auto act = [](const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    return Activation::identity;
  };
  EquivalentSoftwareModel m;
  m.hidden_activation = act(h.value("hidden_activation", "relu"));
  m.output_activation = act(h.value("output_activation", "identity"));
  m.w1 = to_matrix(find(raw, "w1"));
  m.b1 = find(raw, "b1").values;
  bool has_w2 = false;
  for (const auto& a : raw.arrays) has_w2 |= a.name == "w2";
  if (has_w2) {
    m.w2 = to_matrix(find(raw, "w2"));
    m.b2 = find(raw, "b2").values;
  }
  m.validate();
  return m;
}

}  // namespace spinrf
