#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "evrobust/common.hpp"

namespace evrobust {

// A single sensor event: timestamp in microseconds, pixel location, signed polarity.
struct Event {
    std::uint64_t t = 0;
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int8_t polarity = 1;  // +1 or -1

    friend bool operator==(const Event&, const Event&) = default;
};

// Canonical event ordering: (t, y, x, polarity). Keeps every seeded downstream
// operation deterministic when timestamps tie.
inline bool event_less(const Event& a, const Event& b) {
    return std::tie(a.t, a.y, a.x, a.polarity) < std::tie(b.t, b.y, b.x, b.polarity);
}

class EventStream {
public:
    EventStream() = default;

    EventStream(std::int32_t width, std::int32_t height, std::uint64_t t_start, std::uint64_t t_end)
        : width_(width), height_(height), t_start_(t_start), t_end_(t_end) {
        require(width > 0 && height > 0, "EventStream: sensor dimensions must be positive");
        require(t_end >= t_start, "EventStream: t_end must be >= t_start");
    }

    std::int32_t width() const { return width_; }
    std::int32_t height() const { return height_; }
    std::uint64_t t_start() const { return t_start_; }
    std::uint64_t t_end() const { return t_end_; }
    std::uint64_t span_us() const { return t_end_ - t_start_; }

    const std::vector<Event>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    void push(const Event& e) {
        validate_event(e);
        if (!events_.empty() && event_less(e, events_.back())) sorted_ = false;
        events_.push_back(e);
    }

    void reserve(std::size_t n) { events_.reserve(n); }

    // Restore the canonical (t, y, x, polarity) order.
    void canonicalize() {
        if (!sorted_) {
            std::stable_sort(events_.begin(), events_.end(), event_less);
            sorted_ = true;
        }
    }

    bool is_sorted() const { return sorted_; }

    friend bool operator==(const EventStream& a, const EventStream& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.t_start_ == b.t_start_ &&
               a.t_end_ == b.t_end_ && a.events_ == b.events_;
    }

private:
    void validate_event(const Event& e) const {
        require(e.polarity == 1 || e.polarity == -1, "Event: polarity must be +1 or -1");
        require(e.x >= 0 && e.x < width_, "Event: x out of sensor bounds");
        require(e.y >= 0 && e.y < height_, "Event: y out of sensor bounds");
        require(e.t >= t_start_ && e.t <= t_end_, "Event: timestamp outside stream span");
    }

    std::int32_t width_ = 0;
    std::int32_t height_ = 0;
    std::uint64_t t_start_ = 0;
    std::uint64_t t_end_ = 0;
    std::vector<Event> events_;
    bool sorted_ = true;
};

struct StreamStats {
    std::uint64_t count_pos = 0;
    std::uint64_t count_neg = 0;
    double mean_rate_per_second = 0.0;
    bool zero_span = false;  // set when the stream has no time extent; rate reported as 0
};

inline StreamStats stream_stats(const EventStream& s) {
    StreamStats st;
    for (const Event& e : s.events()) {
        if (e.polarity > 0)
            ++st.count_pos;
        else
            ++st.count_neg;
    }
    const std::uint64_t span = s.span_us();
    if (span == 0) {
        st.zero_span = true;
        st.mean_rate_per_second = 0.0;
    } else {
        st.mean_rate_per_second =
            static_cast<double>(st.count_pos + st.count_neg) / (static_cast<double>(span) * 1e-6);
    }
    return st;
}

}  // namespace evrobust
