#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gridtrust/fe/fe.hpp"
#include "gridtrust/rng.hpp"

namespace gridtrust::detect {

using fe::QuantizedFirstLayer;

/// Keras-layout LSTM: W is input_dim x 4u, U is u x 4u (row-major), b is 4u;
/// gate blocks ordered input, forget, cell, output.
struct LstmLayer {
  std::size_t input_dim = 0;
  std::size_t units = 0;
  std::vector<double> W;
  std::vector<double> U;
  std::vector<double> b;

  /// ShapeError when sizes disagree.
  void validate() const;
  /// Hidden state after every step, from zero initial state.
  std::vector<std::vector<double>> forward(const std::vector<std::vector<double>>& sequence) const;
};

/// Output layer: n_in x 2 weights (row-major) and 2 biases, softmax activation.
struct DenseLayer {
  std::size_t input_dim = 0;
  std::size_t units = 0;
  std::vector<double> W;
  std::vector<double> b;

  void validate() const;
  std::vector<double> forward(std::span<const double> x) const;
};

/// d x n first layer, its n activations fed to the LSTM stack as a length-n
/// sequence of 1-d inputs, then a 2-way softmax.
struct ModelWeights {
  QuantizedFirstLayer first;
  std::vector<LstmLayer> lstm;
  DenseLayer output;

  /// ShapeError unless the layers chain (first n -> lstm[0] input 1, units
  /// -> next input, last units -> output input, output units 2).
  void validate() const;
};

/// Structured-text weight file (JSON, versioned; reals as decimal strings).
/// ParseError, ShapeError, NonFiniteError.
ModelWeights parse_weights(const std::string& text);
ModelWeights load_weights(const std::filesystem::path& path);
std::string weights_to_text(const ModelWeights& w);

/// Random weights with the configured shapes, Glorot-uniform scaled and
/// rounded to float32 values. ShapeError when n >= d.
ModelWeights random_weights(std::size_t d, std::size_t n, std::size_t units, std::size_t lstm_layers, Rng& rng,
                            const crypto::FixedPointCodec& codec = crypto::FixedPointCodec());

using ActivationVector = std::vector<double>;

/// a_c = tanh(P_c / (reading_scale * 2^bits) + b_c) from exact inner products.
ActivationVector first_layer_private(std::span<const std::int64_t> products, const QuantizedFirstLayer& layer);

/// Exact integer inner products of encoded readings with each weight column.
std::vector<std::int64_t> first_layer_products(std::span<const std::int64_t> encoded_readings,
                                               const QuantizedFirstLayer& layer);

/// Plain path on readings in kWh with the quantized weights; readings are
/// encoded with the layer's codec, so the result equals the private path
/// bit for bit. ShapeError for a wrong length.
ActivationVector first_layer_plain(std::span<const double> readings_kwh, const QuantizedFirstLayer& layer);

/// tanh(x W_real + b) with unquantized weights; ShapeError if the layer has none.
ActivationVector first_layer_full_precision(std::span<const double> readings_kwh, const QuantizedFirstLayer& layer);

/// Pre-activations (before tanh) of the two first-layer variants.
std::vector<double> preactivation_private(std::span<const std::int64_t> products, const QuantizedFirstLayer& layer);
std::vector<double> preactivation_full_precision(std::span<const double> readings_kwh, const QuantizedFirstLayer& layer);

struct Inference {
  std::array<double, 2> logits{};
  /// (honest, theft)
  std::array<double, 2> probs{};
  bool theft() const { return probs[1] > probs[0]; }
};

/// LSTM stack and softmax head on first-layer activations.
Inference infer_from_activations(const ActivationVector& act, const ModelWeights& w);
Inference infer_private(std::span<const std::int64_t> products, const ModelWeights& w);
Inference infer_plain(std::span<const double> readings_kwh, const ModelWeights& w);
Inference infer_full_precision(std::span<const double> readings_kwh, const ModelWeights& w);

std::uint64_t dense_parameter_count(std::uint64_t input_dim, std::uint64_t units);
std::uint64_t lstm_parameter_count(std::uint64_t input_dim, std::uint64_t units);

struct LayerCount {
  std::string name;
  std::uint64_t units;
  std::uint64_t parameters;
};

/// Per-layer parameter counts of loaded weights.
std::vector<LayerCount> parameter_counts(const ModelWeights& w);

/// Counts for the per-timestep reading of the architecture (dense 1 -> 10
/// applied at every step, LSTM 10 -> 300, LSTM 300 -> 300, dense 300 -> 2).
std::vector<LayerCount> per_timestep_parameter_counts(std::uint64_t dense_units = 10, std::uint64_t lstm_units = 300);

}  // namespace gridtrust::detect
