#include "mesocov/rng.hpp"

#include <cmath>

namespace mesocov {

namespace {
constexpr uint32_t PHILOX_M0 = 0xD2511F53u;
constexpr uint32_t PHILOX_M1 = 0xCD9E8D57u;
constexpr uint32_t PHILOX_W0 = 0x9E3779B9u; // golden ratio
constexpr uint32_t PHILOX_W1 = 0xBB67AE85u; // sqrt(3)-1

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline void philox_round(uint32_t c[4], const uint32_t k[2]) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(PHILOX_M0, c[0], hi0, lo0);
    mulhilo(PHILOX_M1, c[2], hi1, lo1);
    uint32_t n0 = hi1 ^ c[1] ^ k[0];
    uint32_t n1 = lo1;
    uint32_t n2 = hi0 ^ c[3] ^ k[1];
    uint32_t n3 = lo0;
    c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
}
} // namespace

void Philox4x32::rounds10(uint32_t ctr[4], const uint32_t key[2]) {
    uint32_t k[2] = {key[0], key[1]};
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, k);
        k[0] += PHILOX_W0;
        k[1] += PHILOX_W1;
    }
}

RngStream::RngStream(uint64_t master_seed, uint64_t sample_index)
    : seed_(master_seed), index_(sample_index) {
    key_[0] = static_cast<uint32_t>(master_seed);
    key_[1] = static_cast<uint32_t>(master_seed >> 32);
}

void RngStream::refill() {
    buf_[0] = static_cast<uint32_t>(block_);
    buf_[1] = static_cast<uint32_t>(block_ >> 32);
    buf_[2] = static_cast<uint32_t>(index_);
    buf_[3] = static_cast<uint32_t>(index_ >> 32);
    Philox4x32::rounds10(buf_, key_);
    ++block_;
    pos_ = 0;
}

uint32_t RngStream::next_u32() {
    if (pos_ >= 4) refill();
    return buf_[pos_++];
}

uint64_t RngStream::next_u64() {
    uint64_t lo = next_u32();
    uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::u01() {
    // 53 random bits mapped to (0,1]
    uint64_t r = next_u64() >> 11;
    return (static_cast<double>(r) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return normal_spare_;
    }
    double u1 = u01();
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.283185307179586476925286766559 * u2;
    normal_spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

} // namespace mesocov
