#pragma once

#include <chrono>
#include <string>

#include "mixdense/errors.hpp"

namespace mixdense {

/// Wall-clock cutoff shared by the search loops of one run.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    /// Never expires.
    Deadline() = default;
    static Deadline after_seconds(double seconds)
    {
        Deadline d;
        d.end_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
        d.armed_ = true;
        return d;
    }

    bool expired() const { return armed_ && Clock::now() > end_; }

    /// Throws NonconvergenceError naming `where` once the deadline has passed.
    void check(const std::string& where, const std::string& partial = {}) const
    {
        if (expired()) throw NonconvergenceError(where + ": wall-clock budget exceeded", partial);
    }

private:
    Clock::time_point end_{};
    bool armed_ = false;
};

}  // namespace mixdense
