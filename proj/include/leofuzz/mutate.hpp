#pragma once
// Havoc-style mutation: a stack of 1..8 byte-level operators per call.

#include <array>
#include <cstdint>
#include <random>

#include "leofuzz/simprog.hpp"

namespace leofuzz {

enum class MutOp : int {
  BitFlip = 0,
  ByteReplace,
  ByteInsert,
  ByteDelete,
  BlockDup,
  Interesting,
};
inline constexpr int kMutOpCount = 6;

struct MutationPolicy {
  std::size_t max_len = 4096;
  int stack_min = 1;
  int stack_max = 8;
};

namespace mutops {

// 0x00, 0xFF, 0x7F and 'A'..'Z'.
extern const std::array<std::uint8_t, 29> kInteresting;

void bit_flip(Bytes& buf, std::size_t bit_index);
void byte_replace(Bytes& buf, std::size_t pos, std::uint8_t value);
void byte_insert(Bytes& buf, std::size_t pos, std::uint8_t value);
void byte_delete(Bytes& buf, std::size_t pos);
void block_dup(Bytes& buf, std::size_t src, std::size_t len, std::size_t dest);

}  // namespace mutops

// Applies `op` at rng-chosen positions/values; re-rolls are the caller's
// concern. Returns false when the operator is not applicable (delete at
// minimum length, growth past max_len).
bool apply_mut_op(Bytes& buf, MutOp op, std::mt19937_64& rng, const MutationPolicy& pol);

// Stacked havoc mutation; result length stays in [1, max_len]. When `applied`
// is non-null the executed operator sequence is appended to it.
Bytes mutate(const Bytes& in, std::mt19937_64& rng, const MutationPolicy& pol,
             std::vector<MutOp>* applied = nullptr);

}  // namespace leofuzz
