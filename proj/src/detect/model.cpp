#include "gridtrust/detect/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "gridtrust/errors.hpp"
#include "json.hpp"

namespace gridtrust::detect {

using json = nlohmann::json;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void require_finite(const std::vector<double>& v, const std::string& what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NonFiniteError(what + " contains a non-finite value");
}

std::string real_to_string(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double real_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ParseError(what + ": expected a decimal string");
  const std::string s = j.get<std::string>();
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos) {
    throw NonFiniteError(what + " contains a non-finite value");
  }
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError(what + ": malformed real '" + s + "'");
  return v;
}

std::vector<double> reals(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(real_from_json(e, what));
  return out;
}

// Row-major matrix from an array of rows.
std::vector<double> matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& what) {
  if (!j.is_array() || j.size() != rows) throw ShapeError(what + ": expected " + std::to_string(rows) + " rows");
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw ShapeError(what + ": expected rows of " + std::to_string(cols));
    for (const auto& e : row) out.push_back(real_from_json(e, what));
  }
  return out;
}

json reals_json(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(real_to_string(x));
  return out;
}

json matrix_json(const std::vector<double>& m, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) out.push_back(reals_json(std::span(m).subspan(r * cols, cols)));
  return out;
}

double float32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::vector<double> glorot(std::size_t fan_in, std::size_t fan_out, std::size_t count, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> out(count);
  for (auto& v : out) v = float32(rng.uniform(-limit, limit));
  return out;
}

}  // namespace

void LstmLayer::validate() const {
  if (input_dim == 0 || units == 0) throw ShapeError("lstm layer with zero size");
  if (W.size() != input_dim * 4 * units) throw ShapeError("lstm W must be input_dim x 4*units");
  if (U.size() != units * 4 * units) throw ShapeError("lstm U must be units x 4*units");
  if (b.size() != 4 * units) throw ShapeError("lstm b must have 4*units entries");
  require_finite(W, "lstm W");
  require_finite(U, "lstm U");
  require_finite(b, "lstm b");
}

std::vector<std::vector<double>> LstmLayer::forward(const std::vector<std::vector<double>>& sequence) const {
  const std::size_t g = 4 * units;
  std::vector<double> h(units, 0.0), c(units, 0.0), z(g);
  std::vector<std::vector<double>> out;
  out.reserve(sequence.size());
  for (const auto& x : sequence) {
    if (x.size() != input_dim) throw ShapeError("lstm input has the wrong width");
    std::copy(b.begin(), b.end(), z.begin());
    for (std::size_t i = 0; i < input_dim; ++i) {
      const double xi = x[i];
      const double* row = &W[i * g];
      for (std::size_t k = 0; k < g; ++k) z[k] += xi * row[k];
    }
    for (std::size_t i = 0; i < units; ++i) {
      const double hi = h[i];
      const double* row = &U[i * g];
      for (std::size_t k = 0; k < g; ++k) z[k] += hi * row[k];
    }
    for (std::size_t u = 0; u < units; ++u) {
      const double ig = sigmoid(z[u]);
      const double fg = sigmoid(z[units + u]);
      const double cand = std::tanh(z[2 * units + u]);
      const double og = sigmoid(z[3 * units + u]);
      c[u] = fg * c[u] + ig * cand;
      h[u] = og * std::tanh(c[u]);
    }
    out.push_back(h);
  }
  return out;
}

void DenseLayer::validate() const {
  if (input_dim == 0 || units == 0) throw ShapeError("dense layer with zero size");
  if (W.size() != input_dim * units) throw ShapeError("dense W must be input_dim x units");
  if (b.size() != units) throw ShapeError("dense b must have units entries");
  require_finite(W, "dense W");
  require_finite(b, "dense b");
}

std::vector<double> DenseLayer::forward(std::span<const double> x) const {
  if (x.size() != input_dim) throw ShapeError("dense input has the wrong width");
  std::vector<double> out(b.begin(), b.end());
  for (std::size_t i = 0; i < input_dim; ++i)
    for (std::size_t k = 0; k < units; ++k) out[k] += x[i] * W[i * units + k];
  return out;
}

void ModelWeights::validate() const {
  if (lstm.empty()) throw ShapeError("model needs at least one lstm layer");
  std::size_t width = 1;  // first-layer activations enter one per step
  for (const auto& l : lstm) {
    l.validate();
    if (l.input_dim != width) throw ShapeError("lstm input_dim does not match the previous layer");
    width = l.units;
  }
  output.validate();
  if (output.input_dim != width) throw ShapeError("output input_dim does not match the last lstm layer");
  if (output.units != 2) throw ShapeError("output layer must have 2 units");
}

ModelWeights parse_weights(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("weight file is not valid structured text: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1) throw ParseError("unsupported weight file version");
    const auto d = doc.at("d").get<std::size_t>();
    const auto n = doc.at("n").get<std::size_t>();
    const crypto::FixedPointCodec codec(doc.at("reading_scale").get<std::int64_t>(),
                                        doc.at("weight_scale_bits").get<int>());
    if (n == 0 || n >= d) throw ShapeError("first layer needs n < d (got d=" + std::to_string(d) + ", n=" + std::to_string(n) + ")");
    const auto& first = doc.at("first");
    const auto& wq = first.at("w_quant");
    if (!wq.is_array() || wq.size() != d) throw ShapeError("w_quant must have d rows");
    std::vector<std::int64_t> w;
    w.reserve(d * n);
    for (const auto& row : wq) {
      if (!row.is_array() || row.size() != n) throw ShapeError("w_quant rows must have n entries");
      for (const auto& e : row) w.push_back(e.get<std::int64_t>());
    }
    std::vector<double> bias = reals(first.at("bias"), "first bias");
    require_finite(bias, "first bias");
    std::optional<std::vector<double>> w_real;
    if (first.contains("w_real")) {
      w_real = matrix(first.at("w_real"), d, n, "first w_real");
      require_finite(*w_real, "first w_real");
    }
    QuantizedFirstLayer layer(d, n, std::move(w), std::move(bias), codec);
    if (w_real) layer = layer.with_real_weights(std::move(*w_real));

    std::vector<LstmLayer> lstm;
    for (const auto& jl : doc.at("lstm")) {
      LstmLayer l;
      l.input_dim = jl.at("input_dim").get<std::size_t>();
      l.units = jl.at("units").get<std::size_t>();
      l.W = matrix(jl.at("W"), l.input_dim, 4 * l.units, "lstm W");
      l.U = matrix(jl.at("U"), l.units, 4 * l.units, "lstm U");
      l.b = reals(jl.at("b"), "lstm b");
      lstm.push_back(std::move(l));
    }
    DenseLayer out;
    const auto& jo = doc.at("output");
    const auto& jw = jo.at("W");
    out.input_dim = jw.is_array() ? jw.size() : 0;
    out.units = out.input_dim > 0 && jw[0].is_array() ? jw[0].size() : 0;
    out.W = matrix(jw, out.input_dim, out.units, "output W");
    out.b = reals(jo.at("b"), "output b");

    ModelWeights mw{std::move(layer), std::move(lstm), std::move(out)};
    mw.validate();
    return mw;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed weight file: ") + e.what());
  }
}

ModelWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open weight file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_weights(ss.str());
}

std::string weights_to_text(const ModelWeights& w) {
  w.validate();
  const auto& f = w.first;
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["d"] = f.d();
  doc["n"] = f.n();
  doc["reading_scale"] = f.codec().reading_scale();
  doc["weight_scale_bits"] = f.codec().weight_scale_bits();
  nlohmann::ordered_json first;
  json wq = json::array();
  for (std::size_t t = 0; t < f.d(); ++t) {
    json row = json::array();
    for (std::size_t c = 0; c < f.n(); ++c) row.push_back(f.w(t, c));
    wq.push_back(row);
  }
  first["w_quant"] = wq;
  first["bias"] = reals_json(f.bias());
  if (f.w_real()) first["w_real"] = matrix_json(*f.w_real(), f.d(), f.n());
  doc["first"] = first;
  nlohmann::ordered_json lstm = nlohmann::ordered_json::array();
  for (const auto& l : w.lstm) {
    nlohmann::ordered_json jl;
    jl["input_dim"] = l.input_dim;
    jl["units"] = l.units;
    jl["W"] = matrix_json(l.W, l.input_dim, 4 * l.units);
    jl["U"] = matrix_json(l.U, l.units, 4 * l.units);
    jl["b"] = reals_json(l.b);
    lstm.push_back(jl);
  }
  doc["lstm"] = lstm;
  nlohmann::ordered_json out;
  out["W"] = matrix_json(w.output.W, w.output.input_dim, w.output.units);
  out["b"] = reals_json(w.output.b);
  doc["output"] = out;
  return doc.dump() + "\n";
}

ModelWeights random_weights(std::size_t d, std::size_t n, std::size_t units, std::size_t lstm_layers, Rng& rng,
                            const crypto::FixedPointCodec& codec) {
  if (n == 0 || n >= d) throw ShapeError("first layer needs 0 < n < d");
  if (lstm_layers == 0 || units == 0) throw ShapeError("model needs at least one lstm layer with units");
  std::vector<double> w_real = glorot(d, n, d * n, rng);
  std::vector<double> bias(n);
  for (auto& b : bias) b = float32(rng.uniform(-0.1, 0.1));
  std::vector<LstmLayer> lstm;
  std::size_t width = 1;
  for (std::size_t k = 0; k < lstm_layers; ++k) {
    LstmLayer l;
    l.input_dim = width;
    l.units = units;
    l.W = glorot(width, 4 * units, width * 4 * units, rng);
    l.U = glorot(units, 4 * units, units * 4 * units, rng);
    l.b.assign(4 * units, 0.0);
    for (std::size_t u = 0; u < units; ++u) l.b[units + u] = 1.0;  // forget-gate bias
    lstm.push_back(std::move(l));
    width = units;
  }
  DenseLayer out{width, 2, glorot(width, 2, width * 2, rng), {0.0, 0.0}};
  ModelWeights mw{QuantizedFirstLayer::from_real(d, n, w_real, bias, codec), std::move(lstm), std::move(out)};
  mw.validate();
  return mw;
}

std::vector<std::int64_t> first_layer_products(std::span<const std::int64_t> encoded_readings,
                                               const QuantizedFirstLayer& layer) {
  if (encoded_readings.size() != layer.d()) throw ShapeError("reading vector length differs from d");
  std::vector<std::int64_t> p(layer.n(), 0);
  for (std::size_t t = 0; t < layer.d(); ++t)
    for (std::size_t c = 0; c < layer.n(); ++c) p[c] += encoded_readings[t] * layer.w(t, c);
  return p;
}

std::vector<double> preactivation_private(std::span<const std::int64_t> products, const QuantizedFirstLayer& layer) {
  if (products.size() != layer.n()) throw ShapeError("product vector length differs from n");
  const double scale = layer.codec().product_scale();
  std::vector<double> z(layer.n());
  for (std::size_t c = 0; c < layer.n(); ++c) z[c] = static_cast<double>(products[c]) / scale + layer.bias()[c];
  return z;
}

ActivationVector first_layer_private(std::span<const std::int64_t> products, const QuantizedFirstLayer& layer) {
  auto z = preactivation_private(products, layer);
  for (auto& v : z) v = std::tanh(v);
  return z;
}

ActivationVector first_layer_plain(std::span<const double> readings_kwh, const QuantizedFirstLayer& layer) {
  if (readings_kwh.size() != layer.d()) throw ShapeError("reading vector length differs from d");
  std::vector<std::int64_t> enc;
  enc.reserve(readings_kwh.size());
  for (double r : readings_kwh) enc.push_back(layer.codec().encode_reading(r));
  return first_layer_private(first_layer_products(enc, layer), layer);
}

std::vector<double> preactivation_full_precision(std::span<const double> readings_kwh, const QuantizedFirstLayer& layer) {
  if (readings_kwh.size() != layer.d()) throw ShapeError("reading vector length differs from d");
  if (!layer.w_real()) throw ShapeError("layer has no full-precision weights");
  const auto& w = *layer.w_real();
  std::vector<double> z(layer.bias());
  for (std::size_t t = 0; t < layer.d(); ++t)
    for (std::size_t c = 0; c < layer.n(); ++c) z[c] += readings_kwh[t] * w[t * layer.n() + c];
  return z;
}

ActivationVector first_layer_full_precision(std::span<const double> readings_kwh, const QuantizedFirstLayer& layer) {
  auto z = preactivation_full_precision(readings_kwh, layer);
  for (auto& v : z) v = std::tanh(v);
  return z;
}

Inference infer_from_activations(const ActivationVector& act, const ModelWeights& w) {
  std::vector<std::vector<double>> seq;
  seq.reserve(act.size());
  for (double a : act) seq.push_back({a});
  for (const auto& l : w.lstm) seq = l.forward(seq);
  const auto logits = w.output.forward(seq.back());
  Inference r;
  r.logits = {logits[0], logits[1]};
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  r.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
  return r;
}

Inference infer_private(std::span<const std::int64_t> products, const ModelWeights& w) {
  return infer_from_activations(first_layer_private(products, w.first), w);
}

Inference infer_plain(std::span<const double> readings_kwh, const ModelWeights& w) {
  return infer_from_activations(first_layer_plain(readings_kwh, w.first), w);
}

Inference infer_full_precision(std::span<const double> readings_kwh, const ModelWeights& w) {
  return infer_from_activations(first_layer_full_precision(readings_kwh, w.first), w);
}

std::uint64_t dense_parameter_count(std::uint64_t input_dim, std::uint64_t units) { return input_dim * units + units; }

std::uint64_t lstm_parameter_count(std::uint64_t input_dim, std::uint64_t units) {
  return 4 * (units * (input_dim + units) + units);
}

std::vector<LayerCount> parameter_counts(const ModelWeights& w) {
  std::vector<LayerCount> out;
  out.push_back({"dense", w.first.n(), dense_parameter_count(w.first.d(), w.first.n())});
  for (std::size_t k = 0; k < w.lstm.size(); ++k) {
    out.push_back({k == 0 ? "lstm" : "lstm-" + std::to_string(k), w.lstm[k].units,
                   lstm_parameter_count(w.lstm[k].input_dim, w.lstm[k].units)});
  }
  out.push_back({"dense-1", w.output.units, dense_parameter_count(w.output.input_dim, w.output.units)});
  return out;
}

std::vector<LayerCount> per_timestep_parameter_counts(std::uint64_t dense_units, std::uint64_t lstm_units) {
  return {{"dense", dense_units, dense_parameter_count(1, dense_units)},
          {"lstm", lstm_units, lstm_parameter_count(dense_units, lstm_units)},
          {"lstm-1", lstm_units, lstm_parameter_count(lstm_units, lstm_units)},
          {"dense-1", 2, dense_parameter_count(lstm_units, 2)}};
}

}  // namespace gridtrust::detect
