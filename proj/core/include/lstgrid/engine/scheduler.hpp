#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lstgrid/engine/ops.hpp"
#include "lstgrid/engine/tiling.hpp"
#include "lstgrid/engine/worker.hpp"

namespace lstgrid::engine {

/// `local` (in-process threads) or a remote `host:port`.
struct WorkerDescriptor {
    std::string endpoint = "local";
    std::size_t capacity = 1;

    bool is_local() const noexcept { return endpoint == "local"; }

    static WorkerDescriptor local(std::size_t slots) { return {"local", slots}; }
    static WorkerDescriptor remote(std::string host_port, std::size_t slots = 1) {
        return {std::move(host_port), slots};
    }
};

/// Parses `local:N` or `host:port`.
WorkerDescriptor parse_worker(std::string_view text);

/// One op over whole-image input bands (not owned; must outlive run_task).
struct Task {
    OpParams params;
    std::vector<const RasterGrid*> bands;

    Task(OpParams p, std::vector<const RasterGrid*> b) : params(std::move(p)), bands(std::move(b)) {}
    std::size_t height() const;
    std::size_t width() const;
};

struct TileJob {
    std::uint64_t job_id = 0;
    Tile tile;
    unsigned attempts = 0;
};

struct TileResult {
    std::uint64_t job_id = 0;
    bool ok = false;
    std::string reason;
    OpOutput output;
};

struct RunOptions {
    /// Extra attempts per job after the first.
    unsigned retry_limit = 1;
    /// One tile per slot with fixed slot assignment (failed jobs still move).
    bool static_tiling = false;
    /// Pull mode tiles per worker slot.
    std::size_t tiles_per_slot = 4;
    WorkerConnection::Timing timing{};
};

struct RunReport {
    std::size_t jobs = 0;
    std::size_t attempts = 0;
    std::size_t failed_attempts = 0;
    std::size_t dead_workers = 0;
};

/// Split -> execute on workers -> aggregate. Output is bit-identical to a
/// single-worker run for every op. Throws TaskError when a job exhausts its
/// retries or every worker is gone.
OpOutput run_task(const Task& task, std::span<const WorkerDescriptor> workers,
                  const RunOptions& options = {}, RunReport* report = nullptr);

/// Composer: stitches raster/label tiles, sums histograms. Throws TaskError
/// listing the job ids of failed or missing tiles.
OpOutput aggregate(std::span<const TileResult> results, std::span<const TileJob> jobs,
                   OpCode op, std::size_t height, std::size_t width);

/// Global DN histogram of one band, computed tile-wise.
DnHistogram reduce_histogram(const RasterGrid& band, std::span<const WorkerDescriptor> workers,
                             int max_dn = 255, const RunOptions& options = {});

/// Runs `task` over the whole image in the calling thread.
OpOutput run_single(const Task& task);

} // namespace lstgrid::engine
