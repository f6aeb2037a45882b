#include "voidwave/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace voidwave {

std::string format_real(Real value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), enough for hashing artifacts; no external deps.
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kSha256Round[64] = {
    0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu, 0x59f111f1u,
    0x923f82a4u, 0xab1c5ed5u, 0xd807aa98u, 0x12835b01u, 0x243185beu, 0x550c7dc3u,
    0x72be5d74u, 0x80deb1feu, 0x9bdc06a7u, 0xc19bf174u, 0xe49b69c1u, 0xefbe4786u,
    0x0fc19dc6u, 0x240ca1ccu, 0x2de92c6fu, 0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau,
    0x983e5152u, 0xa831c66du, 0xb00327c8u, 0xbf597fc7u, 0xc6e00bf3u, 0xd5a79147u,
    0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu, 0x53380d13u,
    0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u, 0xa2bfe8a1u, 0xa81a664bu,
    0xc24b8b70u, 0xc76c51a3u, 0xd192e819u, 0xd6990624u, 0xf40e3585u, 0x106aa070u,
    0x19a4c116u, 0x1e376c08u, 0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au,
    0x5b9cca4fu, 0x682e6ff3u, 0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u,
    0x90befffau, 0xa4506cebu, 0xbef9a3f7u, 0xc67178f2u};

std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

class Sha256 {
public:
    void update(const unsigned char* data, std::size_t size) {
        total_bytes_ += size;
        while (size > 0) {
            const std::size_t take = std::min<std::size_t>(64 - buffered_, size);
            std::memcpy(buffer_ + buffered_, data, take);
            buffered_ += take;
            data += take;
            size -= take;
            if (buffered_ == 64) {
                transform(buffer_);
                buffered_ = 0;
            }
        }
    }

    std::string hex_digest() {
        const std::uint64_t bits = total_bytes_ * 8;
        const unsigned char one = 0x80;
        update(&one, 1);
        const unsigned char zero = 0x00;
        while (buffered_ != 56) {
            update(&zero, 1);
        }
        unsigned char length[8];
        for (int i = 0; i < 8; ++i) {
            length[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        }
        update(length, 8);

        char out[65];
        for (int i = 0; i < 8; ++i) {
            std::snprintf(out + 8 * i, 9, "%08x", state_[i]);
        }
        return std::string(out, 64);
    }

private:
    void transform(const unsigned char block[64]) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i) {
            w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
                   (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
        std::uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = h + s1 + ch + kSha256Round[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            h = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        state_[0] += a; state_[1] += b; state_[2] += c; state_[3] += d;
        state_[4] += e; state_[5] += f; state_[6] += g; state_[7] += h;
    }

    std::uint32_t state_[8] = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                               0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    std::uint64_t total_bytes_ = 0;
    unsigned char buffer_[64];
    std::size_t buffered_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) {
        throw ConfigError("cannot write file '" + path.string() + "'");
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) {
        throw ConfigError("cannot open file '" + path.string() + "'");
    }
    return in;
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& detail) {
    throw ConfigError("corrupt file '" + path.string() + "': " + detail);
}

} // namespace

std::string sha256_hex(const void* data, std::size_t size) {
    Sha256 hash;
    hash.update(static_cast<const unsigned char*>(data), size);
    return hash.hex_digest();
}

std::string sha256_hex(const std::string& text) {
    return sha256_hex(text.data(), text.size());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::binary);
    Sha256 hash;
    char chunk[1 << 16];
    while (in) {
        in.read(chunk, sizeof(chunk));
        hash.update(reinterpret_cast<const unsigned char*>(chunk),
                    static_cast<std::size_t>(in.gcount()));
    }
    return hash.hex_digest();
}

// ---------------------------------------------------------------------------
// Nodal field files
// ---------------------------------------------------------------------------

void write_field(const std::filesystem::path& path, const Grid& grid,
                 const Eigen::VectorXd& values) {
    if (values.size() != grid.node_count()) {
        throw ConfigError("write_field: value count does not match the grid");
    }
    std::ofstream out = open_output(path, std::ios::out);
    out << "voidwave-field 1\n";
    out << "dimension " << grid.dimension << "\n";
    out << "degree " << grid.degree << "\n";
    if (grid.dimension == 2) {
        out << "origin " << format_real(grid.origin.x) << " " << format_real(grid.origin.y) << "\n";
        out << "extent " << format_real(grid.extent.x) << " " << format_real(grid.extent.y) << "\n";
        out << "element_size " << format_real(grid.hx) << " " << format_real(grid.hy) << "\n";
    } else {
        out << "origin " << format_real(grid.origin.x) << "\n";
        out << "extent " << format_real(grid.extent.x) << "\n";
        out << "element_size " << format_real(grid.hx) << "\n";
    }
    out << "values " << values.size() << "\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out << format_real(values[i]) << "\n";
    }
    if (!out) {
        throw ConfigError("write_field: failed writing '" + path.string() + "'");
    }
}

LoadedField read_field(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::in);

    std::string magic, version;
    in >> magic >> version;
    if (magic != "voidwave-field" || version != "1") {
        corrupt(path, "not a field file");
    }

    int dimension = 0;
    int degree = 0;
    Vec2 origin{0.0, 0.0};
    Vec2 extent{0.0, 0.0};
    Vec2 element_size{0.0, 0.0};
    Eigen::Index count = -1;

    std::string key;
    while (count < 0 && (in >> key)) {
        if (key == "dimension") {
            in >> dimension;
        } else if (key == "degree") {
            in >> degree;
        } else if (key == "origin") {
            in >> origin.x;
            if (dimension == 2) in >> origin.y;
        } else if (key == "extent") {
            in >> extent.x;
            if (dimension == 2) in >> extent.y;
        } else if (key == "element_size") {
            in >> element_size.x;
            if (dimension == 2) in >> element_size.y;
        } else if (key == "values") {
            in >> count;
        } else {
            corrupt(path, "unexpected header entry '" + key + "'");
        }
        if (!in) {
            corrupt(path, "truncated header");
        }
    }
    if (dimension != 1 && dimension != 2) {
        corrupt(path, "bad dimension");
    }

    LoadedField field;
    field.grid = build_grid(dimension, extent, element_size, degree, origin);
    if (count != field.grid.node_count()) {
        corrupt(path, "value count does not match the grid");
    }
    field.values.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        if (!(in >> field.values[i])) {
            corrupt(path, "truncated values");
        }
    }
    return field;
}

// ---------------------------------------------------------------------------
// Recordings
// ---------------------------------------------------------------------------

void write_recording_csv(const std::filesystem::path& path, const WaveRecording& rec) {
    std::ofstream out = open_output(path, std::ios::out);
    out << "# voidwave-recording 1\n";
    out << "# dt " << format_real(rec.dt) << "\n";
    out << "# source " << rec.source_index << "\n";
    out << "# receiver_x";
    for (const Vec2& r : rec.receivers) out << " " << format_real(r.x);
    out << "\n# receiver_y";
    for (const Vec2& r : rec.receivers) out << " " << format_real(r.y);
    out << "\ntime";
    for (std::size_t i = 0; i < rec.receivers.size(); ++i) out << ",receiver_" << i;
    out << "\n";
    for (Eigen::Index row = 0; row < rec.samples.rows(); ++row) {
        out << format_real(static_cast<Real>(row) * rec.dt);
        for (Eigen::Index col = 0; col < rec.samples.cols(); ++col) {
            out << "," << format_real(rec.samples(row, col));
        }
        out << "\n";
    }
    if (!out) {
        throw ConfigError("write_recording_csv: failed writing '" + path.string() + "'");
    }
}

WaveRecording read_recording_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::in);
    WaveRecording rec;
    std::vector<Real> xs, ys;
    std::vector<std::vector<Real>> rows;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream header(line.substr(1));
            std::string key;
            header >> key;
            if (key == "dt") {
                header >> rec.dt;
            } else if (key == "source") {
                header >> rec.source_index;
            } else if (key == "receiver_x") {
                Real v;
                while (header >> v) xs.push_back(v);
            } else if (key == "receiver_y") {
                Real v;
                while (header >> v) ys.push_back(v);
            }
            continue;
        }
        if (line.rfind("time", 0) == 0) continue; // column header
        std::istringstream cells(line);
        std::string cell;
        std::vector<Real> row;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                corrupt(path, "bad numeric cell '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (xs.size() != ys.size() || xs.empty() || rows.empty() || rec.dt <= 0.0) {
        corrupt(path, "incomplete recording header");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        rec.receivers.push_back(Vec2{xs[i], ys[i]});
    }
    rec.samples.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(xs.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != xs.size() + 1) {
            corrupt(path, "row " + std::to_string(r) + " has the wrong number of cells");
        }
        for (std::size_t c = 0; c < xs.size(); ++c) {
            rec.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c + 1];
        }
    }
    return rec;
}

namespace {

constexpr char kRecordingMagic[8] = {'V', 'W', 'R', 'E', 'C', 'B', '1', '\n'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

} // namespace

void write_recording_binary(const std::filesystem::path& path, const WaveRecording& rec) {
    std::ofstream out = open_output(path, std::ios::binary);
    out.write(kRecordingMagic, sizeof(kRecordingMagic));
    write_pod(out, static_cast<std::int64_t>(rec.source_index));
    write_pod(out, rec.dt);
    write_pod(out, static_cast<std::int64_t>(rec.receivers.size()));
    write_pod(out, static_cast<std::int64_t>(rec.samples.rows()));
    for (const Vec2& r : rec.receivers) {
        write_pod(out, r.x);
        write_pod(out, r.y);
    }
    for (Eigen::Index row = 0; row < rec.samples.rows(); ++row) {
        for (Eigen::Index col = 0; col < rec.samples.cols(); ++col) {
            write_pod(out, rec.samples(row, col));
        }
    }
    if (!out) {
        throw ConfigError("write_recording_binary: failed writing '" + path.string() + "'");
    }
}

WaveRecording read_recording_binary(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, std::ios::binary);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kRecordingMagic, sizeof(magic)) != 0) {
        corrupt(path, "not a binary recording");
    }
    std::int64_t source = 0, receivers = 0, rows = 0;
    WaveRecording rec;
    read_pod(in, source);
    read_pod(in, rec.dt);
    read_pod(in, receivers);
    read_pod(in, rows);
    if (!in || receivers <= 0 || rows <= 0 || rec.dt <= 0.0) {
        corrupt(path, "bad recording header");
    }
    rec.source_index = static_cast<int>(source);
    rec.receivers.resize(static_cast<std::size_t>(receivers));
    for (Vec2& r : rec.receivers) {
        read_pod(in, r.x);
        read_pod(in, r.y);
    }
    rec.samples.resize(rows, receivers);
    for (Eigen::Index row = 0; row < rows; ++row) {
        for (Eigen::Index col = 0; col < receivers; ++col) {
            read_pod(in, rec.samples(row, col));
        }
    }
    if (!in) {
        corrupt(path, "truncated samples");
    }
    return rec;
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<IterationRecord>& trace) {
    std::ofstream out = open_output(path, std::ios::out);
    out << "iteration,objective,normalized_objective,projected_gradient_norm,step_length\n";
    for (const IterationRecord& rec : trace) {
        out << rec.iteration << "," << format_real(rec.objective) << ","
            << format_real(rec.normalized_objective) << ","
            << format_real(rec.projected_gradient_norm) << "," << format_real(rec.step_length)
            << "\n";
    }
    if (!out) {
        throw ConfigError("write_convergence_csv: failed writing '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

ExportFormat parse_export_format(const std::string& name) {
    if (name == "csv_grid") return ExportFormat::csv_grid;
    if (name == "vtk_legacy_ascii") return ExportFormat::vtk_legacy_ascii;
    throw ConfigError("unknown export format '" + name +
                      "' (expected csv_grid or vtk_legacy_ascii)");
}

namespace {

void export_csv_grid(const Grid& grid, const Eigen::VectorXd& values, std::ofstream& out) {
    // Header row: x coordinates of the nodal lattice. 1D fields become a
    // single row with y = 0.
    for (Index ix = 0; ix < grid.nodes_x(); ++ix) {
        out << "," << format_real(grid.axis_x[static_cast<std::size_t>(ix)]);
    }
    out << "\n";
    const Index rows = grid.nodes_y();
    for (Index iy = 0; iy < rows; ++iy) {
        const Real y = grid.dimension == 2 ? grid.axis_y[static_cast<std::size_t>(iy)] : 0.0;
        out << format_real(y);
        for (Index ix = 0; ix < grid.nodes_x(); ++ix) {
            out << "," << format_real(values[iy * grid.nodes_x() + ix]);
        }
        out << "\n";
    }
}

// STRUCTURED_POINTS needs uniform spacing; for degree > 1 the nodal
// lattice is not uniform, so the interpolant is sampled on a uniform
// lattice with the same point counts instead.
void export_vtk(const Grid& grid, const Eigen::VectorXd& values, std::ofstream& out) {
    const Index nx = grid.nodes_x();
    const Index ny = grid.nodes_y();
    const Real dx = nx > 1 ? grid.extent.x / static_cast<Real>(nx - 1) : 1.0;
    const Real dy = (grid.dimension == 2 && ny > 1) ? grid.extent.y / static_cast<Real>(ny - 1)
                                                    : 1.0;

    out << "# vtk DataFile Version 3.0\n";
    out << "voidwave field\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << nx << " " << ny << " 1\n";
    out << "ORIGIN " << format_real(grid.origin.x) << " " << format_real(grid.origin.y)
        << " 0\n";
    out << "SPACING " << format_real(dx) << " " << format_real(dy) << " 1\n";
    out << "POINT_DATA " << nx * ny << "\n";
    out << "SCALARS field double 1\n";
    out << "LOOKUP_TABLE default\n";

    std::vector<Index> nodes;
    for (Index iy = 0; iy < ny; ++iy) {
        for (Index ix = 0; ix < nx; ++ix) {
            Real sample = 0.0;
            if (grid.degree == 1) {
                sample = values[iy * nx + ix]; // lattice already uniform
            } else {
                const Vec2 point{grid.origin.x + static_cast<Real>(ix) * dx,
                                 grid.dimension == 2
                                     ? grid.origin.y + static_cast<Real>(iy) * dy
                                     : 0.0};
                const PointLocation loc = locate_point(grid, point);
                const BasisEval basis = evaluate_basis(grid, loc.element, loc.reference);
                grid.element_nodes(loc.element, nodes);
                for (std::size_t i = 0; i < nodes.size(); ++i) {
                    sample += basis.values[i] * values[nodes[i]];
                }
            }
            out << format_real(sample) << "\n";
        }
    }
}

} // namespace

void export_field(const Grid& grid, const Eigen::VectorXd& values,
                  const std::filesystem::path& out_path, ExportFormat format) {
    if (values.size() != grid.node_count()) {
        throw ConfigError("export_field: value count does not match the grid");
    }
    std::ofstream out = open_output(out_path, std::ios::out);
    if (format == ExportFormat::csv_grid) {
        export_csv_grid(grid, values, out);
    } else {
        export_vtk(grid, values, out);
    }
    if (!out) {
        throw ConfigError("export_field: failed writing '" + out_path.string() + "'");
    }
}

void export_field_file(const std::filesystem::path& field_path,
                       const std::filesystem::path& out_path, ExportFormat format) {
    const LoadedField field = read_field(field_path);
    export_field(field.grid, field.values, out_path, format);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

ArtifactManifest::ArtifactManifest(std::filesystem::path directory)
    : directory_(std::move(directory)) {
    std::filesystem::create_directories(directory_);
}

std::filesystem::path ArtifactManifest::resolve(const std::string& relative) const {
    std::filesystem::path path = directory_ / relative;
    std::filesystem::create_directories(path.parent_path());
    return path;
}

void ArtifactManifest::add(const std::string& relative) {
    if (std::find(entries_.begin(), entries_.end(), relative) == entries_.end()) {
        entries_.push_back(relative);
    }
}

void ArtifactManifest::write(const std::string& command) const {
    std::vector<std::string> sorted = entries_;
    std::sort(sorted.begin(), sorted.end());

    nlohmann::json artifacts = nlohmann::json::array();
    for (const std::string& relative : sorted) {
        const std::filesystem::path path = directory_ / relative;
        artifacts.push_back({{"path", relative},
                             {"bytes", std::filesystem::file_size(path)},
                             {"sha256", sha256_file(path)}});
    }
    const nlohmann::json manifest = {{"command", command}, {"artifacts", artifacts}};

    std::ofstream out = open_output(directory_ / "manifest.json", std::ios::out);
    out << manifest.dump(2) << "\n";
}

} // namespace voidwave
