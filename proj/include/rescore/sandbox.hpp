#pragma once

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "rescore/errors.hpp"
#include "rescore/image.hpp"
#include "rescore/util.hpp"

namespace rescore::sandbox {

namespace fs = std::filesystem;

struct ExecutionLimits {
    double wall_timeout = 300.0;               // seconds
    std::size_t max_output_bytes = 64 * 1024;  // per stream, tail-truncated
    std::string interpreter_command = "python3";
    std::string script_filename = "script.py";
    bool no_network = false; // wraps the interpreter in `unshare -r -n`

    bool operator==(const ExecutionLimits&) const = default;
};

inline ExecutionLimits limits_from_env() {
    ExecutionLimits limits;
    if (const char* v = std::getenv("RESCORE_INTERPRETER")) limits.interpreter_command = v;
    return limits;
}

struct ExitStatus {
    enum class Kind { exited, timeout, spawn_failure };
    Kind kind = Kind::exited;
    int code = 0; // meaningful for Kind::exited; signals map to 128+sig

    bool operator==(const ExitStatus&) const = default;
};

struct ExecutionResult {
    ExitStatus exit_status;
    std::string stdout_tail;
    std::string stderr_tail;
    std::optional<fs::path> plot_path; // present iff output.png exists and decodes
    double wall_time = 0.0;

    bool operator==(const ExecutionResult&) const = default;
};

/// Conventional plot artifact location the coder prompt mandates.
inline fs::path expected_plot_path(const fs::path& workdir) {
    return workdir / "output.png";
}

namespace detail {

inline std::string read_tail(const fs::path& path, std::size_t max_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    in.seekg(0, std::ios::end);
    auto size = static_cast<std::size_t>(in.tellg());
    std::size_t want = std::min(size, max_bytes);
    in.seekg(static_cast<std::streamoff>(size - want), std::ios::beg);
    std::string out(want, '\0');
    in.read(out.data(), static_cast<std::streamsize>(want));
    return out;
}

} // namespace detail

/// Runs one candidate script in an isolated working directory. The script is
/// written to the workdir, executed with the configured interpreter (cwd set
/// to the workdir), and its whole process group is killed at the wall
/// timeout. Stdout/stderr land in workdir/stdout.txt and stderr.txt.
inline ExecutionResult execute_script(std::string_view script_source, const fs::path& workdir,
                                      const ExecutionLimits& limits) {
    fs::create_directories(workdir);
    if (!fs::is_empty(workdir))
        throw std::invalid_argument("execute_script: workdir must be empty: " + workdir.string());

    const fs::path script_path = workdir / limits.script_filename;
    util::write_file(script_path, script_source);

    std::vector<std::string> argv_storage;
    if (limits.no_network) argv_storage = {"unshare", "-r", "-n"};
    for (auto& tok : util::split_whitespace(limits.interpreter_command))
        argv_storage.push_back(tok);
    if (argv_storage.empty()) throw SpawnFailure("empty interpreter command");
    argv_storage.push_back(limits.script_filename);

    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());
    argv.push_back(nullptr);

    const fs::path stdout_path = workdir / "stdout.txt";
    const fs::path stderr_path = workdir / "stderr.txt";

    int exec_pipe[2];
    if (pipe2(exec_pipe, O_CLOEXEC) != 0) throw SpawnFailure(std::strerror(errno));

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        close(exec_pipe[0]);
        close(exec_pipe[1]);
        throw SpawnFailure(std::strerror(errno));
    }

    if (pid == 0) {
        // Child: own process group so the whole tree can be reaped on timeout.
        setpgid(0, 0);
        if (chdir(workdir.c_str()) != 0) _exit(126);
        int out_fd = open(stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        int err_fd = open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (out_fd < 0 || err_fd < 0) _exit(126);
        dup2(out_fd, STDOUT_FILENO);
        dup2(err_fd, STDERR_FILENO);
        close(out_fd);
        close(err_fd);
        execvp(argv[0], argv.data());
        int saved = errno;
        ssize_t n = write(exec_pipe[1], &saved, sizeof(saved));
        (void)n;
        _exit(127);
    }

    close(exec_pipe[1]);
    int exec_errno = 0;
    ssize_t got = read(exec_pipe[0], &exec_errno, sizeof(exec_errno));
    close(exec_pipe[0]);
    if (got > 0) {
        waitpid(pid, nullptr, 0);
        throw SpawnFailure(std::string(argv_storage.front()) + ": " + std::strerror(exec_errno));
    }

    ExecutionResult result;
    int status = 0;
    bool timed_out = false;
    while (true) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw SpawnFailure(std::strerror(errno));
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        if (elapsed.count() >= limits.wall_timeout) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(15));
    }
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (timed_out) {
        result.exit_status = {ExitStatus::Kind::timeout, -1};
    } else if (WIFEXITED(status)) {
        result.exit_status = {ExitStatus::Kind::exited, WEXITSTATUS(status)};
    } else if (WIFSIGNALED(status)) {
        result.exit_status = {ExitStatus::Kind::exited, 128 + WTERMSIG(status)};
    } else {
        result.exit_status = {ExitStatus::Kind::exited, -1};
    }

    result.stdout_tail = detail::read_tail(stdout_path, limits.max_output_bytes);
    result.stderr_tail = detail::read_tail(stderr_path, limits.max_output_bytes);

    const fs::path plot = expected_plot_path(workdir);
    if (image::is_readable_image(plot)) result.plot_path = plot;

    return result;
}

} // namespace rescore::sandbox
