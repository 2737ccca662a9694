#include "lstgrid/engine/scheduler.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "lstgrid/error.hpp"
#include "../text_util.hpp"

namespace lstgrid::engine {

WorkerDescriptor parse_worker(std::string_view text) {
    if (text == "local") return WorkerDescriptor::local(1);
    if (text.rfind("local:", 0) == 0) {
        const auto n = detail::parse_int<std::size_t>(text.substr(6));
        if (!n || *n == 0)
            throw std::invalid_argument("worker slots must be >= 1 in '" + std::string(text) + "'");
        return WorkerDescriptor::local(*n);
    }
    net::parse_endpoint(text); // validates host:port
    return WorkerDescriptor::remote(std::string(text));
}

std::size_t Task::height() const { return bands.empty() ? 0 : bands.front()->height(); }
std::size_t Task::width() const { return bands.empty() ? 0 : bands.front()->width(); }

namespace {

void validate(const Task& task) {
    const auto want = band_count(task.params);
    if (task.bands.size() != want)
        throw std::invalid_argument(std::string(to_string(op_code(task.params))) + ": expected " +
                                    std::to_string(want) + " bands, got " +
                                    std::to_string(task.bands.size()));
    if (task.bands.empty()) throw std::invalid_argument("task has no input bands");
    for (const auto* b : task.bands) {
        if (!b) throw std::invalid_argument("task band is null");
        if (!b->same_shape(*task.bands.front()))
            throw std::invalid_argument("task input bands differ in shape");
    }
}

std::vector<RasterGrid> tile_inputs(const Task& task, const Tile& t) {
    std::vector<RasterGrid> out;
    out.reserve(task.bands.size());
    for (const auto* b : task.bands) out.push_back(b->window(t.row0, t.rows, t.col0, t.cols));
    return out;
}

void set_legend(OpOutput& out, const OpParams& params) {
    if (auto* g = std::get_if<ClassifiedGrid>(&out)) {
        g->legend.clear();
        for (const auto& s : std::get<ClassifyParams>(params).signatures)
            g->legend.push_back(s.class_name);
    }
}

struct Slot {
    bool local = true;
    net::Endpoint endpoint;
};

std::string describe(const TileJob& j) {
    return "job " + std::to_string(j.job_id) + " (rows " + std::to_string(j.tile.row0) + ".." +
           std::to_string(j.tile.row0 + j.tile.rows - 1) + ")";
}

} // namespace

OpOutput run_single(const Task& task) {
    validate(task);
    std::vector<RasterGrid> bands;
    for (const auto* b : task.bands) bands.push_back(*b);
    auto out = execute_op(task.params, bands);
    set_legend(out, task.params);
    return out;
}

OpOutput aggregate(std::span<const TileResult> results, std::span<const TileJob> jobs, OpCode op,
                   std::size_t height, std::size_t width) {
    std::vector<const TileResult*> by_job(jobs.size(), nullptr);
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (const auto& r : results)
            if (r.job_id == jobs[i].job_id) by_job[i] = &r;
        if (!by_job[i]) problems.push_back(describe(jobs[i]) + " missing");
        else if (!by_job[i]->ok) problems.push_back(describe(jobs[i]) + " failed: " + by_job[i]->reason);
    }
    if (!problems.empty()) {
        std::string msg = "task aggregation failed:";
        for (const auto& p : problems) msg += " [" + p + "]";
        throw TaskError(msg);
    }

    if (op == OpCode::Histogram) {
        DnHistogram total;
        for (const auto* r : by_job) total.merge(std::get<DnHistogram>(r->output));
        return total;
    }
    if (op == OpCode::ClassifyMap) {
        ClassifiedGrid out(width, height);
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const auto& t = jobs[i].tile;
            const auto& g = std::get<ClassifiedGrid>(by_job[i]->output);
            if (g.width != t.cols || g.height != t.rows)
                throw TaskError(describe(jobs[i]) + " returned a mis-shaped tile");
            for (std::size_t r = 0; r < t.rows; ++r)
                std::copy_n(g.labels.begin() + static_cast<std::ptrdiff_t>(r * t.cols), t.cols,
                            out.labels.begin() + static_cast<std::ptrdiff_t>((t.row0 + r) * width + t.col0));
        }
        return out;
    }
    RasterPayload out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& t = jobs[i].tile;
        const auto& p = std::get<RasterPayload>(by_job[i]->output);
        if (p.grid.width() != t.cols || p.grid.height() != t.rows)
            throw TaskError(describe(jobs[i]) + " returned a mis-shaped tile");
        if (i == 0) out.grid = RasterGrid(width, height, p.grid.nodata());
        out.grid.paste(p.grid, t.row0, t.col0);
        out.flagged += p.flagged;
    }
    return out;
}

OpOutput run_task(const Task& task, std::span<const WorkerDescriptor> workers,
                  const RunOptions& options, RunReport* report) {
    validate(task);
    if (workers.empty()) throw TaskError("no workers available");

    std::vector<Slot> slots;
    for (const auto& w : workers) {
        if (w.capacity == 0) throw std::invalid_argument("worker capacity must be >= 1");
        Slot s;
        s.local = w.is_local();
        if (!s.local) s.endpoint = net::parse_endpoint(w.endpoint);
        for (std::size_t i = 0; i < w.capacity; ++i) slots.push_back(s);
    }
    const bool any_remote = std::any_of(slots.begin(), slots.end(), [](const Slot& s) { return !s.local; });

    const std::size_t height = task.height();
    const std::size_t width = task.width();
    std::size_t n_tiles = options.static_tiling
                              ? slots.size()
                              : slots.size() * std::max<std::size_t>(1, options.tiles_per_slot);
    if (any_remote) {
        const std::size_t row_bytes = width * 8 * task.bands.size();
        const std::size_t max_rows = (wire::kMaxFrameBytes - (64u << 10)) / std::max<std::size_t>(1, row_bytes);
        if (max_rows == 0) throw TaskError("image rows too wide for a single JOB frame");
        n_tiles = std::max(n_tiles, (height + max_rows - 1) / max_rows);
    }

    std::vector<TileJob> jobs;
    for (const auto& t : split(height, width, n_tiles)) jobs.push_back({jobs.size(), t, 0});

    std::mutex m;
    std::condition_variable cv;
    std::deque<std::size_t> shared;
    std::vector<std::deque<std::size_t>> own(slots.size());
    std::vector<TileResult> done(jobs.size());
    std::size_t completed = 0;
    std::size_t live = slots.size();
    std::optional<std::string> fatal;
    std::string last_worker_error;
    RunReport stats;
    stats.jobs = jobs.size();

    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (options.static_tiling) own[j % slots.size()].push_back(j);
        else shared.push_back(j);
    }

    auto retire = [&](std::size_t k, const std::string& why) {
        // Caller holds the lock.
        --live;
        ++stats.dead_workers;
        last_worker_error = why;
        for (auto j : own[k]) shared.push_back(j);
        own[k].clear();
        if (live == 0 && completed < jobs.size() && !fatal)
            fatal = "all workers failed; last error: " + why;
        cv.notify_all();
    };

    auto slot_main = [&](std::size_t k) {
        std::optional<WorkerConnection> conn;
        if (!slots[k].local) {
            try {
                conn.emplace(WorkerConnection::connect(slots[k].endpoint, options.timing));
            } catch (const std::exception& e) {
                std::lock_guard lock(m);
                retire(k, e.what());
                return;
            }
        }
        while (true) {
            std::size_t j = 0;
            {
                std::unique_lock lock(m);
                cv.wait(lock, [&] {
                    return fatal || completed == jobs.size() || !own[k].empty() || !shared.empty();
                });
                if (fatal || completed == jobs.size()) return;
                auto& q = own[k].empty() ? shared : own[k];
                j = q.front();
                q.pop_front();
                ++jobs[j].attempts;
                ++stats.attempts;
            }

            std::optional<OpOutput> out;
            std::string failure;
            bool worker_lost = false;
            try {
                const auto inputs = tile_inputs(task, jobs[j].tile);
                if (slots[k].local) {
                    out = execute_op(task.params, inputs);
                } else {
                    std::vector<const RasterGrid*> ptrs;
                    for (const auto& g : inputs) ptrs.push_back(&g);
                    out = conn->run(jobs[j].job_id, task.params, ptrs);
                }
            } catch (const ProtocolError& e) {
                failure = e.what();
                worker_lost = true;
            } catch (const std::exception& e) {
                failure = e.what();
            }

            std::lock_guard lock(m);
            if (out) {
                done[j] = {jobs[j].job_id, true, {}, std::move(*out)};
                ++completed;
            } else {
                ++stats.failed_attempts;
                if (jobs[j].attempts > options.retry_limit) {
                    if (!fatal)
                        fatal = describe(jobs[j]) + " failed after " +
                                std::to_string(jobs[j].attempts) + " attempt(s): " + failure;
                } else {
                    shared.push_back(j);
                }
            }
            if (worker_lost) {
                retire(k, failure);
                return;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) threads.emplace_back(slot_main, k);
    for (auto& t : threads) t.join();

    if (report) *report = stats;
    if (fatal) throw TaskError(*fatal);

    auto out = aggregate(done, jobs, op_code(task.params), height, width);
    set_legend(out, task.params);
    return out;
}

DnHistogram reduce_histogram(const RasterGrid& band, std::span<const WorkerDescriptor> workers,
                             int max_dn, const RunOptions& options) {
    Task task(HistogramParams{max_dn}, {&band});
    return std::get<DnHistogram>(run_task(task, workers, options));
}

} // namespace lstgrid::engine
