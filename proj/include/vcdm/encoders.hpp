#pragma once

#include <memory>
#include <span>
#include <string>

#include "vcdm/config.hpp"
#include "vcdm/corpus.hpp"
#include "vcdm/parameters.hpp"
#include "vcdm/tensor.hpp"
#include "vcdm/vocabulary.hpp"

namespace vcdm {

// Maps a token-id sequence to one annotation vector per position, returned as
// a [length, output_dim] matrix.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual Tensor encode(std::span<const TokenId> ids) const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual std::size_t vocab_size() const = 0;
  virtual ParamGroup group() const = 0;
};

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config, std::size_t output_dim, std::size_t vocab_size,
                                      ParameterStore& store, const std::string& prefix, ParamGroup group,
                                      double init_scale);

struct ContextEncoding {
  Tensor annotations;  // h_c, [pair length, d_c]
  Tensor target;       // r_w, [d_c]
};

// r_w is the arithmetic mean of the annotations over the target span.
ContextEncoding encode_context(const Encoder& encoder, std::span<const TokenId> pair, IndexRange target_span);

// r_d is the encoder output at position 0 ([CLS]).
Tensor encode_definition(const Encoder& encoder, std::span<const TokenId> sequence);

}  // namespace vcdm
