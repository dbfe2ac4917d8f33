#pragma once
// Counter-based random streams (Philox4x32-10).
//
// Every sample index k gets its own stream keyed by (master_seed, k), so the
// matrix drawn for sample k is a pure function of the seed and the index --
// reproducible bit-for-bit no matter how samples are scheduled across workers.

#include <cstdint>

namespace mesocov {

// One round-trip of the Philox4x32 bijection, 10 rounds (Salmon et al. 2011).
struct Philox4x32 {
    static void rounds10(uint32_t ctr[4], const uint32_t key[2]);
};

class RngStream {
public:
    RngStream(uint64_t master_seed, uint64_t sample_index);

    uint32_t next_u32();
    uint64_t next_u64();
    // uniform on (0,1], never exactly 0 (safe for log())
    double u01();
    // standard normal via Box-Muller (pairs cached)
    double normal();

    uint64_t master_seed() const { return seed_; }
    uint64_t sample_index() const { return index_; }

private:
    void refill();

    uint64_t seed_, index_;
    uint64_t block_ = 0;
    uint32_t key_[2];
    uint32_t buf_[4];
    int pos_ = 4;              // exhausted -> refill on first use
    double normal_spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mesocov
