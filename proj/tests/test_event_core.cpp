#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "evrobust/event_io.hpp"
#include "evrobust/rps.hpp"
#include "oracles.hpp"

using namespace evrobust;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "evrobust_event_core";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EventStream random_stream(std::size_t count, std::uint64_t seed, bool positive_only = false) {
    EventStream s(64, 48, 100, 10100);
    CounterRng rng(seed, 0xe7u);
    for (std::size_t i = 0; i < count; ++i) {
        Event e;
        e.t = 100 + rng.uniform_index(10001);
        e.x = static_cast<std::int32_t>(rng.uniform_index(64));
        e.y = static_cast<std::int32_t>(rng.uniform_index(48));
        e.polarity = positive_only ? std::int8_t{1} : (rng.bernoulli(0.5) ? std::int8_t{1} : std::int8_t{-1});
        s.push(e);
    }
    s.canonicalize();
    return s;
}

}  // namespace

TEST_CASE("single event lands in its bin") {
    EventStream s(8, 8, 0, 99);  // span [0, 100)
    s.push({0, 3, 2, 1});
    const VoxelGrid g = encode_voxel(s, 4);
    CHECK(g(0, 2, 3) == 1.0);
    CHECK(g.abs_sum() == 1.0);
}

TEST_CASE("opposite polarities in one cell cancel") {
    EventStream s(8, 8, 0, 99);
    s.push({10, 3, 2, 1});
    s.push({12, 3, 2, -1});
    const VoxelGrid g = encode_voxel(s, 4);
    CHECK(g(0, 2, 3) == 0.0);
    CHECK(g.abs_sum() == 0.0);
}

TEST_CASE("10k collision-free events all counted, against per-cell oracle") {
    const EventStream s = random_stream(10000, 21, /*positive_only=*/true);
    const VoxelGrid g = encode_voxel(s, 6);
    CHECK(g.abs_sum() == 10000.0);

    std::map<std::tuple<Index, Index, Index>, double> counts;
    for (const Event& e : s.events()) {
        const Index tau = voxel_bin(e.t, s.t_start(), s.t_end(), 6);
        counts[{tau, e.y, e.x}] += e.polarity;
    }
    for (const auto& [key, v] : counts) {
        const auto [tau, y, x] = key;
        CHECK(g(tau, y, x) == v);
    }
}

TEST_CASE("bin index in range and grid sum matches polarity counts") {
    const EventStream s = random_stream(5000, 22);
    for (const Event& e : s.events()) {
        const Index tau = voxel_bin(e.t, s.t_start(), s.t_end(), 6);
        CHECK(tau >= 0);
        CHECK(tau < 6);
    }
    const VoxelGrid g = encode_voxel(s, 6);
    const StreamStats st = stream_stats(s);
    CHECK(g.sum() == static_cast<double>(st.count_pos) - static_cast<double>(st.count_neg));
}

TEST_CASE("voxel encoding is linear over disjoint event sets") {
    const EventStream all = random_stream(4000, 23);
    EventStream a(all.width(), all.height(), all.t_start(), all.t_end());
    EventStream b(all.width(), all.height(), all.t_start(), all.t_end());
    CounterRng rng(77);
    for (const Event& e : all.events()) (rng.bernoulli(0.5) ? a : b).push(e);
    const VoxelGrid ga = encode_voxel(a, 5);
    const VoxelGrid gb = encode_voxel(b, 5);
    const VoxelGrid gall = encode_voxel(all, 5);
    CHECK((ga.raw() + gb.raw() == gall.raw()).all());
}

TEST_CASE("encode_voxel rejects degenerate spans") {
    EventStream s(4, 4, 50, 50);
    CHECK_THROWS_AS(encode_voxel(s, 4), ValidationError);
}

TEST_CASE("stream_stats basics") {
    EventStream empty(4, 4, 0, 0);
    const StreamStats se = stream_stats(empty);
    CHECK(se.count_pos == 0);
    CHECK(se.count_neg == 0);
    CHECK(se.mean_rate_per_second == 0.0);
    CHECK(se.zero_span);

    EventStream s(4, 4, 0, 1000000);  // exactly one second
    for (int i = 0; i < 5; ++i) s.push({static_cast<std::uint64_t>(i), 1, 1, 1});
    for (int i = 0; i < 3; ++i) s.push({static_cast<std::uint64_t>(i), 2, 2, -1});
    const StreamStats st = stream_stats(s);
    CHECK(st.count_pos == 5);
    CHECK(st.count_neg == 3);
    CHECK(st.mean_rate_per_second == doctest::Approx(8.0));
    CHECK_FALSE(st.zero_span);
}

TEST_CASE("stats unchanged by thinning at alpha zero") {
    const EventStream s = random_stream(500, 29);
    const EventStream t = thin_stream(s, 0.0, 123);
    const StreamStats a = stream_stats(s);
    const StreamStats b = stream_stats(t);
    CHECK(a.count_pos == b.count_pos);
    CHECK(a.count_neg == b.count_neg);
    CHECK(a.mean_rate_per_second == b.mean_rate_per_second);
}

TEST_CASE("EVT1 round trip is canonical and byte-stable") {
    const auto dir = temp_dir();
    EventStream s(16, 16, 0, 1000);
    s.push({30, 5, 6, -1});
    s.push({10, 2, 3, 1});
    s.push({10, 1, 3, 1});

    const auto p1 = dir / "three.evt";
    const auto p2 = dir / "three_again.evt";
    write_events(s, p1);
    const EventStream r = read_events(p1);
    write_events(r, p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(r.size() == 3);
    CHECK(r.events()[0].y == 3);
    CHECK(r.events()[0].x == 1);  // ties broken by (y, x)
}

TEST_CASE("EVT1 round trip on a large random stream") {
    const auto dir = temp_dir();
    const EventStream s = random_stream(100000, 31);
    const auto p = dir / "big.evt";
    write_events(s, p);
    const EventStream r = read_events(p);
    CHECK(r == s);
}

TEST_CASE("EVT1 parse errors carry line numbers and offending records") {
    const auto dir = temp_dir();
    const auto p = dir / "bad.evt";
    {
        std::ofstream out(p);
        out << "EVT1 8 8 0 100\n10 3 2 1\nnot an event\n";
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(read_events(p)), doctest::Contains(":3:"),
                         ValidationError);

    {
        std::ofstream out(p);
        out << "EVT1 8 8 0 100\n10 8 2 1\n";  // x == sensor_width
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(read_events(p)), doctest::Contains("10 8 2 1"),
                         ValidationError);
}

TEST_CASE("VOX1 round trip") {
    const auto dir = temp_dir();
    VoxelGrid g(3, 4, 5);
    CounterRng rng(37);
    for (Index i = 0; i < g.size(); ++i)
        g.raw()[i] = static_cast<double>(rng.uniform_index(7)) - 3.0;
    const auto p = dir / "grid.vox";
    write_voxel(g, p);
    const VoxelGrid r = read_voxel(p);
    CHECK(r.bins() == 3);
    CHECK((r.raw() == g.raw()).all());
    write_voxel(r, dir / "grid2.vox");
    CHECK(slurp(p) == slurp(dir / "grid2.vox"));
}

TEST_CASE("event invariants are enforced on push") {
    EventStream s(8, 8, 0, 100);
    CHECK_THROWS_AS(s.push({10, 8, 0, 1}), ValidationError);   // x out of bounds
    CHECK_THROWS_AS(s.push({10, 0, 8, 1}), ValidationError);   // y out of bounds
    CHECK_THROWS_AS(s.push({10, 0, 0, 0}), ValidationError);   // bad polarity
    CHECK_THROWS_AS(s.push({101, 0, 0, 1}), ValidationError);  // outside span
}
