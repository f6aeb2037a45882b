#pragma once

#include "voidwave/grid.hpp"
#include "voidwave/optimize.hpp"
#include "voidwave/propagate.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace voidwave {

// Formats a double with 17 significant digits (lossless text round-trip).
std::string format_real(Real value);

// ---------------------------------------------------------------------------
// Nodal field files: a small text header describing the grid, then one
// value per line. Scaling fields, gradients, and snapshots all use this.
// ---------------------------------------------------------------------------

void write_field(const std::filesystem::path& path, const Grid& grid,
                 const Eigen::VectorXd& values);

struct LoadedField {
    Grid grid;
    Eigen::VectorXd values;
};

LoadedField read_field(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Receiver recordings: CSV (header comments with dt, source index and
// receiver positions; one column per receiver) and an equivalent binary
// variant for bulk observation data.
// ---------------------------------------------------------------------------

void write_recording_csv(const std::filesystem::path& path, const WaveRecording& rec);
WaveRecording read_recording_csv(const std::filesystem::path& path);

void write_recording_binary(const std::filesystem::path& path, const WaveRecording& rec);
WaveRecording read_recording_binary(const std::filesystem::path& path);

// Convergence trace of an inversion run.
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<IterationRecord>& trace);

// ---------------------------------------------------------------------------
// Plot-ready exports of nodal fields.
// ---------------------------------------------------------------------------

enum class ExportFormat {
    csv_grid,        // header row of x coordinates, leading column of y coordinates
    vtk_legacy_ascii // STRUCTURED_POINTS dataset with one scalar field
};

ExportFormat parse_export_format(const std::string& name);

void export_field(const Grid& grid, const Eigen::VectorXd& values,
                  const std::filesystem::path& out_path, ExportFormat format);

// Reads a stored field file and exports it.
void export_field_file(const std::filesystem::path& field_path,
                       const std::filesystem::path& out_path, ExportFormat format);

// ---------------------------------------------------------------------------
// Artifact tracking: drivers register every file they write; the manifest
// lists them with content hashes so runs can be compared and archived.
// ---------------------------------------------------------------------------

std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::filesystem::path& path);

class ArtifactManifest {
public:
    explicit ArtifactManifest(std::filesystem::path directory);

    const std::filesystem::path& directory() const { return directory_; }
    std::filesystem::path resolve(const std::string& relative) const;

    // Registers a file (given relative to the output directory).
    void add(const std::string& relative);

    // Writes <directory>/manifest.json with hashes of all registered files.
    void write(const std::string& command) const;

private:
    std::filesystem::path directory_;
    std::vector<std::string> entries_;
};

} // namespace voidwave
