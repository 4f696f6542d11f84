#include "evrobust/tensor_io.hpp"

#include <fstream>

#include "evrobust/event_io.hpp"

namespace evrobust {

void write_tensor4(const Tensor4d& t, std::ostream& out) {
    out << "T4 " << t.batch() << ' ' << t.channels() << ' ' << t.height() << ' ' << t.width()
        << '\n';
    for (Index i = 0; i < t.size(); ++i)
        out << format_double(t.raw()[i]) << (i + 1 == t.size() ? '\n' : ' ');
}

Tensor4d read_tensor4(std::istream& in, const std::string& context) {
    std::string magic;
    Index b = 0, n = 0, h = 0, w = 0;
    if (!(in >> magic >> b >> n >> h >> w) || magic != "T4")
        throw ValidationError(context + ": malformed header, expected `T4 <B> <N> <H> <W>`");
    Tensor4d t(b, n, h, w);
    for (Index i = 0; i < t.size(); ++i) {
        if (!(in >> t.raw()[i]))
            throw ValidationError(context + ": truncated T4 data at value " + std::to_string(i));
    }
    return t;
}

void write_tensor4(const Tensor4d& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    write_tensor4(t, out);
    if (!out) throw ValidationError("write failed: " + path.string());
}

Tensor4d read_tensor4(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open T4 dump: " + path.string());
    return read_tensor4(in, path.string());
}

}  // namespace evrobust
