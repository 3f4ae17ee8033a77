#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rescore/corpus.hpp"
#include "rescore/image.hpp"
#include "rescore/llm.hpp"
#include "rescore/util.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() {
#ifdef RESCORE_FIXTURES_DIR
    return fs::path(RESCORE_FIXTURES_DIR);
#else
    return fs::path("tests/fixtures");
#endif
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "rescore") {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)) + "-" + std::to_string(rd() % 100000));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_png(const fs::path& path, unsigned width = 64, unsigned height = 48,
                      unsigned seed = 1) {
    rescore::image::Canvas canvas(width, height);
    canvas.line(2, static_cast<int>(height) - 4, static_cast<int>(width) - 2, 4 + static_cast<int>(seed % 13),
                {20, 60, 200});
    canvas.rect_outline(1, 1, static_cast<int>(width) - 2, static_cast<int>(height) - 2, {0, 0, 0});
    canvas.save(path);
}

/// A minimal well-formed bundle on disk: two marked pages and one plot.
inline rescore::corpus::AnnotationBundle make_bundle(const fs::path& dir,
                                                     const std::string& paper_id = "test-paper") {
    fs::create_directories(dir);
    write_png(dir / "page_1.png", 120, 90, 1);
    write_png(dir / "page_2.png", 120, 90, 2);
    write_png(dir / "target_plot.png", 160, 120, 3);
    nlohmann::json manifest{
        {"paper_id", paper_id},
        {"problem_statement", "Track a reference speed profile with a first-order plant."},
        {"parameters",
         nlohmann::json::array({{{"name", "k"}, {"value", "0.6"}},
                                {{"name", "tau"}, {"value", "1.5"}, {"units", "s"}}})},
        {"initial_conditions", "v(0) = 0"},
        {"equation_pages",
         nlohmann::json::array(
             {{{"image", "page_1.png"},
               {"page_num", 1},
               {"boxes", nlohmann::json::array({{{"x", 4}, {"y", 6}, {"w", 40}, {"h", 18}},
                                                 {{"x", 8}, {"y", 40}, {"w", 50}, {"h", 20}}})}},
              {{"image", "page_2.png"},
               {"page_num", 2},
               {"boxes", nlohmann::json::array({{{"x", 10}, {"y", 10}, {"w", 30}, {"h", 12}}})}}})},
        {"target_plot", "target_plot.png"}};
    rescore::util::write_file(dir / "bundle.json", manifest.dump(2) + "\n");
    return rescore::corpus::load_bundle(dir);
}

/// Stdlib-only plot script: a deterministic PNG without plotting packages.
inline constexpr const char* kTinyPlotScript = R"PY(
import struct, zlib

def chunk(tag, data):
    return (struct.pack('>I', len(data)) + tag + data
            + struct.pack('>I', zlib.crc32(tag + data) & 0xffffffff))

w, h = 32, 24
rows = b''.join(b'\x00' + bytes([250, 250, 250] * w) for _ in range(h))
png = (b'\x89PNG\r\n\x1a\n'
       + chunk(b'IHDR', struct.pack('>IIBBBBB', w, h, 8, 2, 0, 0, 0))
       + chunk(b'IDAT', zlib.compress(rows, 9))
       + chunk(b'IEND', b''))
open('output.png', 'wb').write(png)
print('saved output.png')
)PY";

/// Bundle whose annotation inputs alone blow the 128K default budget:
/// 90 marked pages at 1500 tokens per high-detail image.
inline rescore::corpus::AnnotationBundle make_overflow_bundle(const fs::path& dir) {
    fs::create_directories(dir);
    write_png(dir / "page.png", 80, 60, 5);
    write_png(dir / "target_plot.png", 80, 60, 6);
    nlohmann::json pages = nlohmann::json::array();
    for (int i = 1; i <= 90; ++i)
        pages.push_back({{"image", "page.png"},
                         {"page_num", i},
                         {"boxes", nlohmann::json::array({{{"x", 2}, {"y", 2}, {"w", 20}, {"h", 10}}})}});
    nlohmann::json manifest{{"paper_id", "dense-overflow"},
                            {"problem_statement", "A derivation-heavy distributed parameter system."},
                            {"parameters", nlohmann::json::array()},
                            {"initial_conditions", ""},
                            {"equation_pages", pages},
                            {"target_plot", "target_plot.png"}};
    rescore::util::write_file(dir / "bundle.json", manifest.dump(2) + "\n");
    return rescore::corpus::load_bundle(dir);
}

/// Gateway provider that serves canned responses in order and records the
/// requests it saw.
class ScriptedProvider {
public:
    explicit ScriptedProvider(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}

    rescore::llm::LlmGateway::Provider provider() {
        return [this](const rescore::llm::CompletionRequest& req) {
            requests.push_back(req);
            if (next_ >= responses_.size())
                throw rescore::Error("scripted provider ran out of responses");
            return responses_[next_++];
        };
    }

    std::vector<rescore::llm::CompletionRequest> requests;

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
};

} // namespace testsupport
