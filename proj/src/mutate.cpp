#include "leofuzz/mutate.hpp"

#include <algorithm>

namespace leofuzz {

namespace mutops {

const std::array<std::uint8_t, 29> kInteresting = [] {
  std::array<std::uint8_t, 29> t{};
  t[0] = 0x00;
  t[1] = 0xFF;
  t[2] = 0x7F;
  for (int i = 0; i < 26; ++i) t[3 + i] = static_cast<std::uint8_t>('A' + i);
  return t;
}();

void bit_flip(Bytes& buf, std::size_t bit_index) {
  buf[bit_index / 8] ^= static_cast<std::uint8_t>(1u << (bit_index % 8));
}

void byte_replace(Bytes& buf, std::size_t pos, std::uint8_t value) {
  buf[pos] = value;
}

void byte_insert(Bytes& buf, std::size_t pos, std::uint8_t value) {
  buf.insert(buf.begin() + pos, value);
}

void byte_delete(Bytes& buf, std::size_t pos) {
  buf.erase(buf.begin() + pos);
}

void block_dup(Bytes& buf, std::size_t src, std::size_t len, std::size_t dest) {
  Bytes chunk(buf.begin() + src, buf.begin() + src + len);
  buf.insert(buf.begin() + dest, chunk.begin(), chunk.end());
}

}  // namespace mutops

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

bool apply_mut_op(Bytes& buf, MutOp op, std::mt19937_64& rng, const MutationPolicy& pol) {
  switch (op) {
    case MutOp::BitFlip:
      if (buf.empty()) return false;
      mutops::bit_flip(buf, pick(rng, 0, buf.size() * 8 - 1));
      return true;
    case MutOp::ByteReplace:
      if (buf.empty()) return false;
      mutops::byte_replace(buf, pick(rng, 0, buf.size() - 1),
                           static_cast<std::uint8_t>(pick(rng, 0, 255)));
      return true;
    case MutOp::ByteInsert:
      if (buf.size() >= pol.max_len) return false;
      mutops::byte_insert(buf, pick(rng, 0, buf.size()),
                          static_cast<std::uint8_t>(pick(rng, 0, 255)));
      return true;
    case MutOp::ByteDelete:
      if (buf.size() <= 1) return false;  // results keep a minimum length of 1
      mutops::byte_delete(buf, pick(rng, 0, buf.size() - 1));
      return true;
    case MutOp::BlockDup: {
      if (buf.empty() || buf.size() >= pol.max_len) return false;
      std::size_t len = pick(rng, 1, std::min<std::size_t>(buf.size(), 32));
      len = std::min(len, pol.max_len - buf.size());
      if (len == 0) return false;
      std::size_t src = pick(rng, 0, buf.size() - len);
      std::size_t dest = pick(rng, 0, buf.size());
      mutops::block_dup(buf, src, len, dest);
      return true;
    }
    case MutOp::Interesting:
      if (buf.empty()) return false;
      mutops::byte_replace(buf, pick(rng, 0, buf.size() - 1),
                           mutops::kInteresting[pick(rng, 0, mutops::kInteresting.size() - 1)]);
      return true;
  }
  return false;
}

Bytes mutate(const Bytes& in, std::mt19937_64& rng, const MutationPolicy& pol,
             std::vector<MutOp>* applied) {
  Bytes buf = in;
  if (buf.empty()) mutops::byte_insert(buf, 0, static_cast<std::uint8_t>(pick(rng, 0, 255)));
  const int stack = static_cast<int>(pick(rng, pol.stack_min, pol.stack_max));
  for (int i = 0; i < stack; ++i) {
    // Re-roll inapplicable operators (delete at minimum length, growth past
    // max_len) a few times rather than dropping the stack slot outright.
    for (int attempt = 0; attempt < 8; ++attempt) {
      const MutOp op = static_cast<MutOp>(pick(rng, 0, kMutOpCount - 1));
      if (apply_mut_op(buf, op, rng, pol)) {
        if (applied) applied->push_back(op);
        break;
      }
    }
  }
  return buf;
}

}  // namespace leofuzz
