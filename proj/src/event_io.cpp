#include "evrobust/event_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace evrobust {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
    throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

EventStream read_events(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) parse_fail(path, 1, "missing EVT1 header");
    ++line_no;
    std::istringstream header(line);
    std::string magic;
    std::int64_t width = 0, height = 0;
    std::uint64_t t_start = 0, t_end = 0;
    if (!(header >> magic >> width >> height >> t_start >> t_end) || magic != "EVT1")
        parse_fail(path, line_no, "malformed header, expected `EVT1 <width> <height> <t_start> <t_end>`");

    EventStream stream(static_cast<std::int32_t>(width), static_cast<std::int32_t>(height), t_start,
                       t_end);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::uint64_t t = 0;
        std::int64_t x = 0, y = 0, p = 0;
        if (!(ls >> t >> x >> y >> p)) parse_fail(path, line_no, "malformed event record `" + line + "`");
        std::string extra;
        if (ls >> extra) parse_fail(path, line_no, "trailing tokens in event record `" + line + "`");
        Event e{t, static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
                static_cast<std::int8_t>(p)};
        try {
            stream.push(e);
        } catch (const ValidationError& err) {
            parse_fail(path, line_no, std::string(err.what()) + " in record `" + line + "`");
        }
    }
    stream.canonicalize();
    return stream;
}

void write_events(const EventStream& stream, const std::filesystem::path& path) {
    EventStream canon = stream;
    canon.canonicalize();
    std::ofstream out = open_out(path);
    out << "EVT1 " << canon.width() << ' ' << canon.height() << ' ' << canon.t_start() << ' '
        << canon.t_end() << '\n';
    for (const Event& e : canon.events()) {
        out << e.t << ' ' << e.x << ' ' << e.y << ' ' << static_cast<int>(e.polarity) << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

VoxelGrid read_voxel(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string magic;
    Index bins = 0, height = 0, width = 0;
    if (!(in >> magic >> bins >> height >> width) || magic != "VOX1")
        parse_fail(path, 1, "malformed header, expected `VOX1 <T> <H> <W>`");
    VoxelGrid grid(bins, height, width);
    for (Index i = 0; i < grid.size(); ++i) {
        double v = 0.0;
        if (!(in >> v)) throw ValidationError(path.string() + ": truncated voxel data at value " +
                                              std::to_string(i));
        grid.raw()[i] = v;
    }
    return grid;
}

void write_voxel(const VoxelGrid& grid, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "VOX1 " << grid.bins() << ' ' << grid.height() << ' ' << grid.width() << '\n';
    for (Index tau = 0; tau < grid.bins(); ++tau) {
        for (Index y = 0; y < grid.height(); ++y) {
            for (Index x = 0; x < grid.width(); ++x) {
                out << format_double(grid(tau, y, x));
                out << (x + 1 == grid.width() ? '\n' : ' ');
            }
        }
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

}  // namespace evrobust
