#include "evrobust/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace evrobust {

namespace {

struct PnmHeader {
    std::string magic;
    Index width = 0;
    Index height = 0;
    int maxval = 255;
};

// Reads the PNM header, skipping `#` comments; leaves the stream right after
// the single whitespace that terminates maxval.
PnmHeader read_pnm_header(std::istream& in, const std::filesystem::path& path) {
    PnmHeader h;
    auto next_token = [&](std::string& tok) {
        for (;;) {
            if (!(in >> tok)) throw ValidationError(path.string() + ": truncated PNM header");
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return;
        }
    };
    std::string tok;
    next_token(tok);
    h.magic = tok;
    next_token(tok);
    h.width = std::stoll(tok);
    next_token(tok);
    h.height = std::stoll(tok);
    next_token(tok);
    h.maxval = std::stoi(tok);
    require(h.width > 0 && h.height > 0, path.string() + ": non-positive PNM dimensions");
    require(h.maxval > 0 && h.maxval < 65536, path.string() + ": unsupported PNM maxval");
    in.get();  // single whitespace before pixel data
    return h;
}

std::vector<double> read_pnm_samples(std::istream& in, const PnmHeader& h, Index count,
                                     const std::filesystem::path& path) {
    std::vector<double> samples(count);
    const double scale = 1.0 / h.maxval;
    const bool binary = h.magic == "P5" || h.magic == "P6";
    if (binary) {
        if (h.maxval < 256) {
            std::vector<unsigned char> buf(count);
            in.read(reinterpret_cast<char*>(buf.data()), count);
            require(in.gcount() == static_cast<std::streamsize>(count),
                    path.string() + ": truncated pixel data");
            for (Index i = 0; i < count; ++i) samples[i] = buf[i] * scale;
        } else {
            std::vector<unsigned char> buf(2 * count);
            in.read(reinterpret_cast<char*>(buf.data()), 2 * count);
            require(in.gcount() == static_cast<std::streamsize>(2 * count),
                    path.string() + ": truncated pixel data");
            for (Index i = 0; i < count; ++i)
                samples[i] = (buf[2 * i] * 256 + buf[2 * i + 1]) * scale;
        }
    } else {
        for (Index i = 0; i < count; ++i) {
            long v = 0;
            if (!(in >> v)) throw ValidationError(path.string() + ": truncated pixel data");
            samples[i] = v * scale;
        }
    }
    return samples;
}

}  // namespace

ImageF read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open image: " + path.string());
    const PnmHeader h = read_pnm_header(in, path);
    if (h.magic == "P5" || h.magic == "P2") {
        ImageF img(h.height, h.width, 1, 1.0);
        const auto s = read_pnm_samples(in, h, h.width * h.height, path);
        for (Index y = 0; y < h.height; ++y)
            for (Index x = 0; x < h.width; ++x) img.at(0, y, x) = s[y * h.width + x];
        return img;
    }
    if (h.magic == "P6" || h.magic == "P3") {
        ImageF img(h.height, h.width, 3, 1.0);
        const auto s = read_pnm_samples(in, h, 3 * h.width * h.height, path);
        for (Index y = 0; y < h.height; ++y)
            for (Index x = 0; x < h.width; ++x)
                for (Index c = 0; c < 3; ++c) img.at(c, y, x) = s[3 * (y * h.width + x) + c];
        return img;
    }
    throw ValidationError(path.string() + ": unsupported PNM magic `" + h.magic + "`");
}

ImagePlane read_image_gray(const std::filesystem::path& path) {
    const ImageF img = read_image(path);
    ImagePlane plane(img.height, img.width);
    if (img.channels == 1) {
        for (Index y = 0; y < img.height; ++y)
            for (Index x = 0; x < img.width; ++x) plane(y, x) = img.at(0, y, x);
    } else {
        for (Index y = 0; y < img.height; ++y)
            for (Index x = 0; x < img.width; ++x)
                plane(y, x) =
                    0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) + 0.114 * img.at(2, y, x);
    }
    return plane;
}

void write_pgm(const ImagePlane& plane, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open image for writing: " + path.string());
    out << "P5\n" << plane.cols() << ' ' << plane.rows() << "\n255\n";
    std::vector<unsigned char> row(plane.cols());
    for (Index y = 0; y < plane.rows(); ++y) {
        for (Index x = 0; x < plane.cols(); ++x) {
            const double v = std::clamp(plane(y, x), 0.0, 1.0);
            row[x] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out) throw ValidationError("write failed: " + path.string());
}

FrameSequence load_frame_sequence(const std::filesystem::path& dir) {
    FrameSequence seq;
    const std::filesystem::path ts_path = dir / "timestamps.txt";
    std::ifstream ts(ts_path);
    if (!ts) throw ValidationError("missing timestamps file: " + ts_path.string());
    std::string line;
    while (std::getline(ts, line)) {
        if (line.empty()) continue;
        seq.timestamps.push_back(std::stoull(line));
    }

    char name[32];
    for (std::size_t i = 0;; ++i) {
        std::snprintf(name, sizeof name, "%06zu.pgm", i);
        std::filesystem::path frame = dir / name;
        if (!std::filesystem::exists(frame)) {
            std::snprintf(name, sizeof name, "%06zu.ppm", i);  // color accepted via luminance
            frame = dir / name;
            if (!std::filesystem::exists(frame)) break;
        }
        seq.frames.push_back(read_image_gray(frame));
    }
    require(!seq.frames.empty(), "no %06d.pgm frames found under " + dir.string());
    seq.validate();
    return seq;
}

}  // namespace evrobust
