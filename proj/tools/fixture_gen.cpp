// Regenerates the committed test fixtures: annotation bundles, replay
// transcripts, the filter mini-corpus, and the benchmark-shaped rating
// tables. Deterministic by construction so reruns reproduce the same files.
//
// Usage: fixture_gen <fixtures-root> [--assets <assets-dir>]

#include <cassert>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "rescore/corpus.hpp"
#include "rescore/eval.hpp"
#include "rescore/image.hpp"
#include "rescore/llm.hpp"
#include "rescore/orchestrator.hpp"
#include "rescore/prompts.hpp"
#include "rescore/stats.hpp"
#include "rescore/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rescore;

namespace {

// ---------------------------------------------------------------------------
// synthetic page / plot images
// ---------------------------------------------------------------------------

void draw_text_rows(image::Canvas& canvas, int x, int y, int w, int rows, unsigned seed) {
    for (int r = 0; r < rows; ++r) {
        int len = w - static_cast<int>((seed * (static_cast<unsigned>(r) + 3)) % 40);
        canvas.fill_rect(x, y + r * 9, len, 3, {70, 70, 70});
    }
}

void write_page_png(const fs::path& path, const std::vector<corpus::Box>& boxes, unsigned seed) {
    image::Canvas canvas(600, 400);
    draw_text_rows(canvas, 40, 30, 520, 8, seed);
    draw_text_rows(canvas, 40, 130, 520, 6, seed + 7);
    draw_text_rows(canvas, 40, 220, 520, 10, seed + 13);
    for (const auto& b : boxes) {
        canvas.rect_outline(b.x, b.y, b.w, b.h, {220, 20, 20});
        canvas.rect_outline(b.x + 1, b.y + 1, b.w - 2, b.h - 2, {220, 20, 20});
    }
    canvas.save(path);
}

void write_plot_png(const fs::path& path, int rows, int cols, unsigned seed) {
    image::Canvas canvas(640, 480);
    int pad = 30;
    int w = (640 - pad * (cols + 1)) / cols;
    int h = (480 - pad * (rows + 1)) / rows;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            int x0 = pad + c * (w + pad);
            int y0 = pad + r * (h + pad);
            canvas.rect_outline(x0, y0, w, h, {0, 0, 0});
            unsigned k = seed + static_cast<unsigned>(r * cols + c);
            int prev_y = y0 + h / 2;
            for (int x = 1; x < w - 2; ++x) {
                double t = static_cast<double>(x) / w * 6.0;
                double v = std::exp(-0.3 * t) * std::cos(t * (1.0 + 0.2 * k));
                int y = y0 + h / 2 - static_cast<int>(v * (h / 2 - 6));
                canvas.line(x0 + x - 1, prev_y, x0 + x, y, {30, 60, 200});
                prev_y = y;
            }
        }
    }
    canvas.save(path);
}

// ---------------------------------------------------------------------------
// case-study bundle: connected cruise control with a safety filter
// ---------------------------------------------------------------------------

const char* kCccPaperId = "ccc-safety-filter";
const char* kExhaustPaperId = "osc-exhaust";
const char* kOverflowPaperId = "dense-overflow";

corpus::AnnotationBundle write_ccc_bundle(const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<corpus::Box> page1_boxes{{60, 128, 360, 40}, {60, 236, 420, 48}};
    std::vector<corpus::Box> page2_boxes{{60, 40, 400, 44}};
    write_page_png(dir / "page_1.png", page1_boxes, 11);
    write_page_png(dir / "page_2.png", page2_boxes, 29);
    write_plot_png(dir / "target_plot.png", 2, 2, 3);

    json manifest{
        {"paper_id", kCccPaperId},
        {"problem_statement",
         "Connected cruise control for a car following a decelerating lead vehicle. A nominal "
         "range-policy controller commands the follower acceleration; a control barrier "
         "function safety filter minimally modifies the nominal input so a time-headway "
         "distance constraint is never violated. Reproduce the 2x2 verification figure: "
         "distance headway, speeds, the (D, v) phase portrait with the safe-set boundary, and "
         "the acceleration inputs, under safe gains, unsafe gains, and the filtered unsafe "
         "gains."},
        {"parameters",
         json::array({{{"name", "kappa"}, {"value", "0.6"}, {"units", "1/s"}},
                      {{"name", "D_st"}, {"value", "5.0"}, {"units", "m"}},
                      {{"name", "D_sf"}, {"value", "1.0"}, {"units", "m"}},
                      {{"name", "T_h"}, {"value", "1.67"}, {"units", "s"}},
                      {{"name", "v_max"}, {"value", "30.0"}, {"units", "m/s"}},
                      {{"name", "a_min"}, {"value", "-6.0"}, {"units", "m/s^2"}},
                      {{"name", "a_max"}, {"value", "3.0"}, {"units", "m/s^2"}},
                      {{"name", "alpha"}, {"value", "1.0"}, {"units", "1/s"}}})},
        {"initial_conditions", "D(0) = 28 m, v(0) = 15 m/s, v_L(0) = 15 m/s"},
        {"equation_pages",
         json::array({{{"image", "page_1.png"},
                       {"page_num", 1},
                       {"boxes", json::array({{{"x", 60}, {"y", 128}, {"w", 360}, {"h", 40}},
                                              {{"x", 60}, {"y", 236}, {"w", 420}, {"h", 48}}})}},
                      {{"image", "page_2.png"},
                       {"page_num", 2},
                       {"boxes", json::array({{{"x", 60}, {"y", 40}, {"w", 400}, {"h", 44}}})}}})},
        {"target_plot", "target_plot.png"},
        {"notes", "Annotated for the bundled end-to-end replay example."}};
    util::write_file(dir / "bundle.json", manifest.dump(2) + "\n");
    return corpus::load_bundle(dir);
}

// Shared stdlib-only rasterizer appended to every generated python script.
const char* kPyRasterTail = R"PY(
def _chunk(tag, data):
    return (struct.pack(">I", len(data)) + tag + data
            + struct.pack(">I", zlib.crc32(tag + data) & 0xffffffff))

def save_png(path):
    raw = b"".join(b"\x00" + bytes(PX[r * W * 3:(r + 1) * W * 3]) for r in range(H))
    png = (b"\x89PNG\r\n\x1a\n"
           + _chunk(b"IHDR", struct.pack(">IIBBBBB", W, H, 8, 2, 0, 0, 0))
           + _chunk(b"IDAT", zlib.compress(raw, 9))
           + _chunk(b"IEND", b""))
    open(path, "wb").write(png)

save_png("output.png")
print("wrote output.png")
)PY";

const char* kPyRasterHead = R"PY(
W, H = 480, 360
PX = bytearray(b"\xff" * (W * H * 3))

def put(x, y, c):
    if 0 <= x < W and 0 <= y < H:
        i = (y * W + x) * 3
        PX[i:i + 3] = bytes(c)

def seg(x0, y0, x1, y1, c):
    n = max(abs(x1 - x0), abs(y1 - y0), 1)
    for i in range(n + 1):
        put(round(x0 + (x1 - x0) * i / n), round(y0 + (y1 - y0) * i / n), c)

def frame(x0, y0, w, h):
    seg(x0, y0, x0 + w - 1, y0, (0, 0, 0))
    seg(x0, y0 + h - 1, x0 + w - 1, y0 + h - 1, (0, 0, 0))
    seg(x0, y0, x0, y0 + h - 1, (0, 0, 0))
    seg(x0 + w - 1, y0, x0 + w - 1, y0 + h - 1, (0, 0, 0))

def series(xs, ys, box, lim, c):
    x0, y0, w, h = box
    xmin, xmax, ymin, ymax = lim
    pts = []
    for x, y in zip(xs, ys):
        sx = x0 + int((x - xmin) / (xmax - xmin + 1e-12) * (w - 1))
        sy = y0 + h - 1 - int((y - ymin) / (ymax - ymin + 1e-12) * (h - 1))
        pts.append((sx, sy))
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        seg(ax, ay, bx, by, c)
)PY";

std::string ccc_script(bool corrected) {
    std::string sim = R"PY(import math, struct, zlib

# Connected cruise control: follower with nominal range-policy control and a
# CBF safety filter, lead vehicle performs a braking maneuver.
kappa = 0.6
D_st = 5.0
D_sf = 1.0
T_h = 1.67
v_max = 30.0
a_min, a_max = -6.0, 3.0
alpha = 1.0
dt = 0.005
T_end = 30.0

def range_policy(D):
    return min(max(kappa * (D - D_st), 0.0), v_max)
)PY";

    if (corrected) {
        sim += R"PY(
def lead_speed(t):
    # trapezoidal ramp-hold-ramp braking profile
    if t < 5.0:
        return 15.0
    if t < 9.0:
        return 15.0 - 12.5 * (t - 5.0) / 4.0
    if t < 14.0:
        return 2.5
    if t < 18.0:
        return 2.5 + 10.0 * (t - 14.0) / 4.0
    return 12.5

def barrier(D, v):
    # time-headway safety constraint
    return (D - D_sf) / T_h - v

def boundary_speed(D):
    return (D - D_sf) / T_h
)PY";
    } else {
        sim += R"PY(
def lead_speed(t):
    # braking event of the lead vehicle
    if t < 5.0:
        return 15.0
    if t < 14.0:
        return 2.5
    return 12.5

def barrier(D, v):
    # policy-boundary constraint
    return kappa * (D - D_st) - v

def boundary_speed(D):
    return range_policy(D)
)PY";
    }

    sim += R"PY(
def simulate(k_gain, filtered):
    D, v = 28.0, 15.0
    ts, Ds, vs, vLs, us = [], [], [], [], []
    t = 0.0
    while t <= T_end:
        vL = lead_speed(t)
        u_nom = k_gain * (range_policy(D) - v)
        u = u_nom
        if filtered:
            # a(x) + b u >= 0 with h' = (vL - v)/T_h - u  (time-headway CBF)
            lhs = alpha * barrier(D, v)
            drift = (vL - v) / T_h if True else 0.0
            u_cap = drift + lhs
            u = min(u_nom, u_cap)
        u = min(max(u, a_min), a_max)
        ts.append(t); Ds.append(D); vs.append(v); vLs.append(vL); us.append(u)
        D += (vL - v) * dt
        v += u * dt
        v = max(v, 0.0)
        t += dt
    return ts, Ds, vs, vLs, us

safe = simulate(0.4, False)
unsafe = simulate(1.4, False)
filt = simulate(1.4, True)
)PY";

    sim += kPyRasterHead;
    sim += R"PY(
boxes = [(40, 20, 190, 140), (270, 20, 190, 140), (40, 200, 190, 140), (270, 200, 190, 140)]
for b in boxes:
    frame(*b)

# distance headway
lim_d = (0.0, 30.0, 0.0, 40.0)
series(safe[0], safe[1], boxes[0], lim_d, (20, 110, 40))
series(unsafe[0], unsafe[1], boxes[0], lim_d, (200, 40, 40))
series(filt[0], filt[1], boxes[0], lim_d, (30, 60, 220))

# speeds
lim_v = (0.0, 30.0, 0.0, 20.0)
series(safe[0], safe[2], boxes[1], lim_v, (20, 110, 40))
series(unsafe[0], unsafe[2], boxes[1], lim_v, (200, 40, 40))
series(filt[0], filt[2], boxes[1], lim_v, (30, 60, 220))
series(filt[0], filt[3], boxes[1], lim_v, (120, 120, 120))

# phase portrait (D, v) with the safe-set boundary
lim_p = (0.0, 40.0, 0.0, 20.0)
bd = [i * 0.5 for i in range(81)]
series(bd, [boundary_speed(d) for d in bd], boxes[2], lim_p, (0, 0, 0))
series(safe[1], safe[2], boxes[2], lim_p, (20, 110, 40))
series(unsafe[1], unsafe[2], boxes[2], lim_p, (200, 40, 40))
series(filt[1], filt[2], boxes[2], lim_p, (30, 60, 220))

# acceleration inputs
lim_u = (0.0, 30.0, -7.0, 4.0)
series(safe[0], safe[4], boxes[3], lim_u, (20, 110, 40))
series(unsafe[0], unsafe[4], boxes[3], lim_u, (200, 40, 40))
series(filt[0], filt[4], boxes[3], lim_u, (30, 60, 220))
)PY";
    sim += kPyRasterTail;
    return sim;
}

std::vector<std::string> ccc_responses() {
    json page1 = json::array(
        {{{"eq_num", "(3)"},
          {"eq_transcriptions",
           "dD/dt = v_L - v,  dv/dt = u  (follower kinematics); u_nom = k (V(D) - v) with the "
           "range policy V(D) = min(max(kappa (D - D_st), 0), v_max)"},
          {"var_definitions",
           {{"D", "distance headway between lead and follower [m]"},
            {"v", "follower speed [m/s]"},
            {"v_L", "lead vehicle speed [m/s]"},
            {"u", "commanded follower acceleration [m/s^2]"},
            {"V(D)", "range policy mapping headway to desired speed"},
            {"kappa", "range policy slope, 0.6 1/s"},
            {"D_st", "standstill distance of the range policy, 5 m"}}},
          {"chain_of_thought",
           "The plant is a two-state car-following model driven by the lead speed; the nominal "
           "controller tracks the range policy. Both are needed to reproduce every curve."},
          {"math_relevance", "Defines the simulated dynamics and the nominal control law."}},
         {{"eq_num", "(5)"},
          {"eq_transcriptions",
           "u_safe = min(u_nom, (v_L - v)/T_h + alpha h(x)): the safety filter minimally "
           "modifies the nominal input subject to dh/dt >= -alpha h"},
          {"var_definitions",
           {{"u_safe", "filtered acceleration input [m/s^2]"},
            {"alpha", "class-K gain of the barrier condition, 1.0 1/s"},
            {"h(x)", "barrier function of the headway state"},
            {"T_h", "time headway constant, 1.67 s"}}},
          {"chain_of_thought",
           "The filter is a closed-form min between the nominal input and the barrier bound; "
           "no QP solver is required for this scalar input case."},
          {"math_relevance", "Produces the filtered trajectory shown in the verification plot."}}});

    json page2 = json::array(
        {{{"eq_num", "(8)"},
          {"eq_transcriptions",
           "h_TH(x) = (D - D_sf)/T_h - v >= 0  (time-headway safety constraint with safe "
           "distance D_sf)"},
          {"var_definitions",
           {{"h_TH", "time-headway barrier function [m/s]"},
            {"D_sf", "safe standstill distance, 1 m"},
            {"T_h", "time headway constant, 1.67 s"}}},
          {"chain_of_thought",
           "This is the constraint the filter must enforce; its boundary v = (D - D_sf)/T_h "
           "separates the safe region in the phase portrait. Note it is distinct from the "
           "range policy despite the similar slope (1/T_h vs kappa)."},
          {"math_relevance", "The barrier used by the safety filter and the phase boundary."}}});

    json plot{{"subplot_count", 4},
              {"subplot_details",
               "2x2 grid: top-left distance headway D(t); top-right speeds v(t) and v_L(t); "
               "bottom-left (D, v) phase portrait with the safe-set boundary line; bottom-right "
               "acceleration inputs u(t). Three cases per axis: safe gains, unsafe gains, "
               "filtered unsafe gains."},
              {"time_range", "0 to 30 s"},
              {"plot_behavior",
               "Lead brakes from 15 m/s to 2.5 m/s and recovers; the unsafe-gain follower "
               "closes the gap dangerously, the filtered trajectory brakes earlier and rides "
               "the safe-set boundary, the safe-gain case stays conservative throughout."},
              {"features",
               "Filtered trajectory separates visibly from both gain settings; phase portrait "
               "trajectories stay above the straight boundary line; acceleration saturates at "
               "the brake limit during the event."},
              {"parsed_values",
               "headway starts near 28 m and dips to roughly 8 m; speeds span 0-16 m/s; "
               "boundary line crosses v = 0 near D = 1 m; inputs bounded by [-6, 3] m/s^2"}};

    std::string diagnosis =
        "The layout matches (2x2, same quantities), but the trajectories do not.\n"
        "(1) Bottom-left phase portrait and top-left headway differ: the filtered trajectory "
        "coincides with the safe-gains curve instead of separating from it, and the plotted "
        "safe-set boundary is the range policy curve rather than a straight line through "
        "D = 1 m.\n"
        "(2) The lead speed drops instantaneously at t = 5 s, so the follower speed and "
        "acceleration show abrupt rectangular transitions; the target shows a smooth "
        "trapezoidal ramp-hold-ramp braking profile.\n"
        "(3) Root cause in the code: the barrier conflates the range policy with the safety "
        "constraint. It uses h(x) = kappa (D - D_st) - v with intercept D_st = 5.0, while the "
        "target uses the time-headway barrier h_TH(x) = (D - D_sf)/T_h - v with D_sf = 1.0; "
        "the slopes are nearly equal (0.6 vs 1/1.67) so the error is the intercept. The lead "
        "profile is modeled as a step instead of a ramp.\n"
        "(4) Fixes: define barrier(D, v) = (D - D_sf)/T_h - v and use its boundary "
        "v = (D - D_sf)/T_h in the phase portrait; replace the step lead-speed function with "
        "a linear ramp down over 4 s, a hold, and a ramp back up.";

    return {
        page1.dump(2),
        page2.dump(2),
        plot.dump(2),
        "Here is the reconstruction:\n```python\n" + ccc_script(false) + "```\n",
        diagnosis,
        "Applying the diagnosed fixes:\n```python\n" + ccc_script(true) + "```\n",
        "Sub-plot layout, axis quantities, curve shapes and numerical ranges now agree; the "
        "filtered trajectory rides the time-headway boundary as in the target.\n"
        "MATCH_CONFIRMED",
    };
}

// ---------------------------------------------------------------------------
// exhaustion bundle: a loop that never converges
// ---------------------------------------------------------------------------

corpus::AnnotationBundle write_exhaust_bundle(const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<corpus::Box> boxes{{60, 60, 380, 46}};
    write_page_png(dir / "page_1.png", boxes, 17);
    write_plot_png(dir / "target_plot.png", 2, 1, 8);
    json manifest{
        {"paper_id", kExhaustPaperId},
        {"problem_statement",
         "Output regulation of a lightly damped oscillator under PD feedback. Reproduce the "
         "two stacked verification plots: position against the reference step, and the "
         "control input."},
        {"parameters", json::array({{{"name", "omega_n"}, {"value", "2.0"}, {"units", "rad/s"}},
                                    {{"name", "zeta"}, {"value", "0.05"}},
                                    {{"name", "kp"}, {"value", "4.0"}},
                                    {{"name", "kd"}, {"value", "0.4"}}})},
        {"initial_conditions", "x(0) = 0, xdot(0) = 0"},
        {"equation_pages",
         json::array({{{"image", "page_1.png"},
                       {"page_num", 1},
                       {"boxes", json::array({{{"x", 60}, {"y", 60}, {"w", 380}, {"h", 46}}})}}})},
        {"target_plot", "target_plot.png"}};
    util::write_file(dir / "bundle.json", manifest.dump(2) + "\n");
    return corpus::load_bundle(dir);
}

std::string oscillator_script(int revision) {
    std::string script = "import math, struct, zlib\n\n";
    script += "# PD-regulated oscillator, candidate revision " + std::to_string(revision) + "\n";
    script += "omega_n = 2.0\nzeta = 0.05\nkp = 4.0\nkd = " +
              util::format_fixed(0.1 + 0.05 * revision, 2) + "\n";
    script += R"PY(dt = 0.002
T_end = 20.0

x, xd = 0.0, 0.0
ts, xs, us = [], [], []
t = 0.0
while t <= T_end:
    r = 1.0 if t >= 1.0 else 0.0
    u = kp * (r - x) - kd * xd
    xdd = -2.0 * zeta * omega_n * xd - omega_n ** 2 * x + u
    ts.append(t); xs.append(x); us.append(u)
    x += xd * dt
    xd += xdd * dt
    t += dt
)PY";
    script += kPyRasterHead;
    script += R"PY(
boxes = [(40, 20, 400, 150), (40, 195, 400, 150)]
for b in boxes:
    frame(*b)
series(ts, xs, boxes[0], (0.0, 20.0, -0.5, 2.0), (30, 60, 220))
series(ts, [1.0 if t >= 1.0 else 0.0 for t in ts], boxes[0], (0.0, 20.0, -0.5, 2.0), (0, 0, 0))
series(ts, us, boxes[1], (0.0, 20.0, -4.0, 6.0), (200, 40, 40))
)PY";
    script += kPyRasterTail;
    return script;
}

std::vector<std::string> exhaust_responses(int max_iterations) {
    json page = json::array(
        {{{"eq_num", "(2)"},
          {"eq_transcriptions",
           "xdd + 2 zeta omega_n xd + omega_n^2 x = u,  u = kp (r - x) - kd xd"},
          {"var_definitions",
           {{"x", "oscillator position"},
            {"xd", "velocity"},
            {"u", "control input"},
            {"r", "unit step reference applied at t = 1 s"}}},
          {"chain_of_thought", "Second-order plant with PD feedback; direct to integrate."},
          {"math_relevance", "Complete closed-loop dynamics for the verification plots."}}});
    json plot{{"subplot_count", 2},
              {"subplot_details", "two stacked axes: position vs reference, control input"},
              {"time_range", "0 to 20 s"},
              {"plot_behavior", "oscillatory settling toward the step reference"},
              {"features", "visible residual ringing; input spikes at the step"},
              {"parsed_values", "position peaks near 1.6; input peaks near 4"}};

    std::vector<std::string> responses{page.dump(2), plot.dump(2)};
    for (int k = 0; k < max_iterations; ++k) {
        responses.push_back("```python\n" + oscillator_script(k) + "```");
        if (k + 1 < max_iterations) {
            responses.push_back(
                "(1) The position subplot differs: ringing persists far longer than the "
                "target.\n"
                "(2) The decay envelope is too slow, steady state is reached after the plotted "
                "window.\n"
                "(3) The derivative gain looks underestimated relative to the annotated "
                "value.\n"
                "(4) Raise kd toward the annotated 0.4 and re-check the envelope.");
        }
    }
    responses.push_back(
        "(1) Both subplots still differ: decay envelope remains visibly slower than the "
        "target.\n"
        "(2) Residual oscillation amplitude at t = 20 s is an order of magnitude too large.\n"
        "(3) The gain sweep never reached the annotated damping; the discrepancy persists.\n"
        "(4) Set kd = 0.4 exactly and verify the closed-loop poles before the next attempt.");
    return responses;
}

// ---------------------------------------------------------------------------
// overflow bundle
// ---------------------------------------------------------------------------

void write_overflow_bundle(const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<corpus::Box> boxes{{40, 40, 200, 60}};
    write_page_png(dir / "page.png", boxes, 41);
    write_plot_png(dir / "target_plot.png", 1, 1, 12);
    json pages = json::array();
    for (int i = 1; i <= 90; ++i)
        pages.push_back({{"image", "page.png"},
                         {"page_num", i},
                         {"boxes", json::array({{{"x", 40}, {"y", 40}, {"w", 200}, {"h", 60}}})}});
    json manifest{
        {"paper_id", kOverflowPaperId},
        {"problem_statement",
         "Spectral analysis of a delay system with a ninety-page derivation appendix; every "
         "page carries annotated equations."},
        {"parameters", json::array({{{"name", "tau"}, {"value", "0.3"}, {"units", "s"}}})},
        {"initial_conditions", ""},
        {"equation_pages", pages},
        {"target_plot", "target_plot.png"}};
    util::write_file(dir / "bundle.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// transcript recording helpers
// ---------------------------------------------------------------------------

llm::LlmGateway canned_gateway(std::vector<std::string> responses) {
    auto next = std::make_shared<std::size_t>(0);
    auto list = std::make_shared<std::vector<std::string>>(std::move(responses));
    return llm::LlmGateway(llm::GatewayConfig{}, [next, list](const llm::CompletionRequest&) {
        if (*next >= list->size()) throw Error("canned gateway exhausted");
        return (*list)[(*next)++];
    });
}

void record_run_transcript(const corpus::AnnotationBundle& bundle,
                           std::vector<std::string> responses, int max_iterations,
                           const fs::path& transcript_out,
                           orchestrator::Termination::Kind expected,
                           std::size_t expected_iterations) {
    auto lib = prompts::PromptLibrary::defaults();
    auto gateway = canned_gateway(std::move(responses));
    llm::Transcript transcript(llm::TranscriptMode::record);
    orchestrator::LoopConfig config;
    config.max_iterations = max_iterations;
    config.transcript_mode = llm::TranscriptMode::record;

    fs::path tmp = fs::temp_directory_path() / ("fixture-gen-" + bundle.paper_id);
    fs::remove_all(tmp);
    auto record = orchestrator::run_reconstruction(bundle, config, gateway, transcript, lib,
                                                   tmp / bundle.paper_id);
    if (record.termination.kind != expected)
        throw Error("fixture run for " + bundle.paper_id + " terminated " +
                    orchestrator::to_string(record.termination.kind) + " (" +
                    record.termination.detail + ")");
    if (record.iterations.size() != expected_iterations)
        throw Error("fixture run for " + bundle.paper_id + " took " +
                    std::to_string(record.iterations.size()) + " iterations");
    transcript.save(transcript_out);
    fs::remove_all(tmp);
    std::cout << "  transcript " << transcript_out.filename() << ": " << transcript.size()
              << " entries\n";
}

// ---------------------------------------------------------------------------
// filter mini-corpus
// ---------------------------------------------------------------------------

struct FilterPaper {
    std::string id;
    std::string title;
    std::string text;
    std::string response;
    std::string label;       // expected
    std::string reason_code; // expected, empty unless NotRecoverable
};

std::vector<FilterPaper> filter_papers() {
    auto text_for = [](const std::string& topic) {
        return "Abstract. " + topic +
               " Simulation studies illustrate the approach. All gains, horizons and initial "
               "states used in the figures are listed in Table 1.";
    };
    std::vector<FilterPaper> papers;
    auto add = [&](std::string id, std::string title, std::string text, std::string response,
                   std::string label, std::string reason = "") {
        papers.push_back({std::move(id), std::move(title), std::move(text), std::move(response),
                          std::move(label), std::move(reason)});
    };

    // recoverable
    add("fp-01", "Adaptive Cruise Regulation with Guaranteed Margins",
        text_for("We design an adaptive cruise regulator with explicit gain tables."),
        "All four criteria hold: parameters are tabulated, the simulations are first-party, no "
        "learning is involved, and Figure 3 is a clear target.\nRECOVERABLE",
        "Recoverable");
    add("fp-02", "Lyapunov-Based Saturation Handling for Integrators",
        text_for("A saturated integrator chain is stabilized with explicit Lyapunov designs."),
        "Complete parameters, self-contained simulation, no training, clear figure.\nRECOVERABLE",
        "Recoverable");
    add("fp-03", "Event-Triggered Regulation of Thermal Loads",
        text_for("Event-triggered thresholds for thermal regulation are derived in closed form."),
        "Criteria (i)-(iv) are satisfied.\nRECOVERABLE", "Recoverable");
    add("fp-04", "Dissipativity Certificates for Cascade Interconnections",
        text_for("Storage functions for cascades are constructed explicitly."),
        "The paper gives every constant and a reproducible phase plot.\nRECOVERABLE",
        "Recoverable");
    add("fp-05", "Robust Margins for Time-Delay Servo Loops",
        text_for("Delay margins for servo loops are computed and validated numerically."),
        "Parameters complete; primary simulation; figure 2 reproducible.\nRECOVERABLE",
        "Recoverable");
    add("fp-06", "Piecewise Affine Tracking with Explicit Switching",
        text_for("Switching surfaces are listed with all vertices."),
        "Everything needed is in the text.\nRECOVERABLE", "Recoverable");
    add("fp-07", "Anti-Windup Compensation for Positioning Stages",
        text_for("An anti-windup scheme with tabulated gains is evaluated on a stage model."),
        "Final label: RECOVERABLE. All criteria met.", "Recoverable");
    add("fp-08", "Sampled-Data Regulation under Quantization",
        text_for("Quantized sampled-data loops with closed-form bounds."),
        "RECOVERABLE - the quantizer levels and plant constants are all stated.", "Recoverable");

    // not recoverable
    add("fp-09", "Deep Policy Tuning for Swing-Up Maneuvers",
        text_for("A deep network policy is trained for swing-up control."),
        "Criterion (iii) fails: the approach relies on training a neural network policy whose "
        "weights are not published.\nNOT RECOVERABLE",
        "NotRecoverable", "NeedsNNTraining");
    add("fp-10", "Learned Residual Models for Drift Compensation",
        text_for("Residual dynamics are fit with a learned network model."),
        "The method requires neural network training on unpublished data.\nNOT RECOVERABLE",
        "NotRecoverable", "NeedsNNTraining");
    add("fp-11", "A Converse Theorem for Integral Stability Notions",
        text_for("We prove converse results for integral stability."),
        "This is a theoretical paper: there is no simulation section at all.\nNOT RECOVERABLE",
        "NotRecoverable", "TheoreticalOnly");
    add("fp-12", "Stability Margins Validated on a Commercial Vehicle Simulator",
        text_for("Results are produced inside a commercial vehicle dynamics package."),
        "Simulations depend on an external simulator that is proprietary.\nNOT RECOVERABLE",
        "NotRecoverable", "ExternalSimulator");
    add("fp-13", "Observer Gains for a Benchmark Reactor Model",
        text_for("Observer tuning for a benchmark reactor; constants follow earlier studies."),
        "Key plant parameters are cited from other references and never restated, so the "
        "simulation cannot be rebuilt.\nNOT RECOVERABLE",
        "NotRecoverable", "ExternalParameters");
    add("fp-14", "Flexible Link Vibration Damping Experiments",
        text_for("Hardware experiments on a flexible link test rig."),
        "There is no simulation figure; all results are hardware traces.\nNOT RECOVERABLE",
        "NotRecoverable", "NoSimulationFigure");
    add("fp-15", "Gain Scheduling Across Flight Envelopes",
        text_for("A scheduling family across envelopes; several gains are only sketched."),
        "The schedule has incomplete parameter listings (half the envelope points are "
        "missing).\nNOT RECOVERABLE",
        "NotRecoverable", "IncompleteParameters");

    // indecisive
    add("fp-16", "Hierarchical Coordination of Warehouse Fleets",
        text_for("A hierarchical coordination layer for fleets with partial listings."),
        "Hard to say: the fleet model is specified, but the toolbox version matters and the "
        "figure mixes hardware and simulation.",
        "Indecisive");
    add("fp-17", "Passivity Interpretations of Haptic Rendering",
        text_for("Passivity conditions for haptic rendering loops."),
        "", "Indecisive");
    add("fp-18", "Spectral Gaps in Consensus over Random Graphs",
        text_for("Consensus rates are related to spectral gaps of random graphs."),
        "The figures could arguably be regenerated, yet the graph seeds are unstated; one "
        "could defend either reading.",
        "Indecisive");
    add("fp-19", "Certainty Equivalence under Mixed Uncertainty",
        text_for("Mixed uncertainty models with certainty-equivalent designs."),
        "Possibly RECOVERABLE, possibly NOT RECOVERABLE: the noise model is ambiguous.",
        "Indecisive");
    add("fp-20", "Input Shaping Catalogue for Crane Operations",
        text_for("A catalogue of shaping filters for crane payloads."),
        "I would prefer a domain expert to decide this one.", "Indecisive");

    return papers;
}

void write_filter_fixture(const fs::path& dir) {
    fs::create_directories(dir / "texts");
    auto papers = filter_papers();

    json catalog = json::array();
    for (const auto& p : papers)
        catalog.push_back(
            {{"paper_id", p.id}, {"title", p.title}, {"year", 2023}, {"venue", "CDC"}});
    util::write_file(dir / "catalog.json", catalog.dump(2) + "\n");

    std::vector<std::string> responses;
    json expected = json::object();
    for (const auto& p : papers) {
        util::write_file(dir / "texts" / (p.id + ".txt"), p.text + "\n");
        responses.push_back(p.response);
        json e{{"label", p.label}};
        if (!p.reason_code.empty()) e["reason_code"] = p.reason_code;
        expected[p.id] = e;
    }
    util::write_file(dir / "expected_labels.json", expected.dump(2) + "\n");

    // Record the classification transcript in catalog order.
    auto lib = prompts::PromptLibrary::defaults();
    auto gateway = canned_gateway(responses);
    llm::Transcript transcript(llm::TranscriptMode::record);
    auto records = corpus::load_catalog(dir);
    for (const auto& record : records) {
        agents::Session session{gateway, transcript, lib, 0, std::nullopt};
        std::string text = util::read_file(dir / "texts" / (record.paper_id + ".txt"));
        agents::classify_recoverability(record, text, session);
    }
    transcript.save(dir / "transcript.json");
    std::cout << "  filter transcript: " << transcript.size() << " entries\n";
}

// ---------------------------------------------------------------------------
// judge fixtures
// ---------------------------------------------------------------------------

void write_judge_fixture(const fs::path& dir, const fs::path& transcripts) {
    fs::create_directories(dir);
    write_plot_png(dir / "plot_a.png", 2, 2, 3);
    write_plot_png(dir / "plot_b.png", 1, 1, 77);

    auto lib = prompts::PromptLibrary::defaults();
    auto record_judgment = [&](const fs::path& generated, const fs::path& target,
                               const std::string& response, const fs::path& out) {
        auto gateway = canned_gateway({response});
        llm::Transcript transcript(llm::TranscriptMode::record);
        agents::Session session{gateway, transcript, lib, 0, std::nullopt};
        eval::judge_frs(generated, target, session);
        transcript.save(out);
    };

    record_judgment(dir / "plot_a.png", dir / "plot_a.png",
                    R"({"score": 4, "rationale": "Identical layout, curves and ranges; a high-fidelity reconstruction."})",
                    transcripts / "judge_frs_match.json");
    record_judgment(dir / "plot_a.png", dir / "plot_b.png",
                    R"({"score": 1, "rationale": "Different subplot count and unrelated curves; the behavior is not captured."})",
                    transcripts / "judge_frs_mismatch.json");
    std::cout << "  judge transcripts written\n";
}

// ---------------------------------------------------------------------------
// benchmark-shaped statistics fixture
// ---------------------------------------------------------------------------

struct BenchRow {
    int h1 = 1, h2 = 1, llm = 1; // rescore scores
    double sp_mean = 1.0;        // single-pass human mean
    int sp_h1 = 1, sp_h2 = 1, sp_llm = 1;
    int year = 0;
    bool converged = false;
    double da_rescore = 0.0, da_single = 0.0;
    double cov_rescore = 0.0, cov_single = 0.0;
    std::string id;
};

struct CellSpec {
    int h1, h2, count;
    std::map<int, int> llm; // llm value -> count
};

// Joint (h1, h2, llm) distribution of the rescore condition. Row/column
// marginals, agreement fractions, threshold shares and the judge-vs-human
// bias all follow from these counts.
const std::vector<CellSpec>& bench_cells() {
    static const std::vector<CellSpec> cells{
        {1, 1, 69, {{1, 21}, {2, 35}, {3, 1}, {4, 12}}},
        {1, 2, 23, {{1, 1}, {2, 1}, {3, 21}}},
        {1, 3, 1, {{2, 1}}},
        {1, 4, 1, {{4, 1}}},
        {2, 2, 15, {{2, 12}, {3, 3}}},
        {2, 3, 18, {{2, 8}, {3, 10}}},
        {2, 4, 1, {{4, 1}}},
        {3, 2, 5, {{2, 2}, {3, 3}}},
        {3, 3, 15, {{2, 2}, {3, 11}, {4, 2}}},
        {3, 4, 8, {{4, 8}}},
        {4, 2, 2, {{2, 2}}},
        {4, 4, 36, {{3, 1}, {4, 35}}},
    };
    return cells;
}

constexpr int kYears[5] = {2021, 2022, 2023, 2024, 2025};
constexpr int kYearN[5] = {38, 41, 46, 40, 29};
// Doubled rescore human-mean sums per year (0.5-step values stay integral).
constexpr int kRescoreHsum2[5] = {159, 185, 203, 160, 136};
constexpr int kRescoreLsum[5] = {110, 114, 124, 102, 84};
// Single-pass targets.
constexpr double kSingleMeanSum[5] = {68.5, 74.5, 76.0, 64.5, 52.5};
constexpr int kSingleLsum[5] = {93, 92, 98, 85, 65};
constexpr int kSingleGe3[5] = {8, 9, 9, 8, 6}; // totals 40
// Design-alignment sums per year (0.5-step values).
constexpr double kRescoreDaSum[5] = {2517.0, 2728.0, 3010.0, 2693.0, 1758.5};
constexpr double kSingleDaSum[5] = {2466.0, 2484.5, 2626.5, 2380.0, 1627.0};
// Equation-coverage grand totals.
constexpr double kRescoreCovTotal = 14410.0;
constexpr double kSingleCovTotal = 14120.0;

std::vector<BenchRow> expand_bench_rows() {
    std::vector<BenchRow> rows;
    for (const auto& cell : bench_cells())
        for (const auto& [llm_value, count] : cell.llm)
            for (int i = 0; i < count; ++i) {
                BenchRow row;
                row.h1 = cell.h1;
                row.h2 = cell.h2;
                row.llm = llm_value;
                rows.push_back(row);
            }
    if (rows.size() != 194) throw Error("benchmark cells must expand to 194 rows");
    return rows;
}

/// Deterministic pair-swap descent assigning rows to years so each year hits
/// its (human-mean sum, llm sum) targets exactly.
void assign_years(std::vector<BenchRow>& rows) {
    std::vector<int> year_of(rows.size());
    std::size_t next = 0;
    for (int y = 0; y < 5; ++y)
        for (int i = 0; i < kYearN[y]; ++i) year_of[next++] = y;

    auto deviation = [&]() {
        long dev = 0;
        long hsum[5] = {0}, lsum[5] = {0};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            hsum[year_of[i]] += rows[i].h1 + rows[i].h2;
            lsum[year_of[i]] += rows[i].llm;
        }
        for (int y = 0; y < 5; ++y)
            dev += std::labs(hsum[y] - kRescoreHsum2[y]) + std::labs(lsum[y] - kRescoreLsum[y]);
        return dev;
    };

    long current = deviation();
    // First-improvement swaps; a deterministic rotation breaks plateaus.
    for (int round = 0; round < 400 && current > 0; ++round) {
        bool improved = false;
        for (std::size_t i = 0; i < rows.size() && current > 0; ++i) {
            for (std::size_t j = i + 1; j < rows.size(); ++j) {
                if (year_of[i] == year_of[j]) continue;
                std::swap(year_of[i], year_of[j]);
                long candidate = deviation();
                if (candidate < current) {
                    current = candidate;
                    improved = true;
                } else {
                    std::swap(year_of[i], year_of[j]);
                }
            }
        }
        if (!improved && current > 0) {
            std::rotate(year_of.begin(), year_of.begin() + 7 + round % 11, year_of.end());
            current = deviation();
        }
    }
    if (current != 0) throw Error("benchmark year assignment did not converge");
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].year = kYears[year_of[i]];
}

/// Distributes `total` over n values starting at `base`, stepping by `step`
/// up to `cap`, cycling rows in order. Exact by construction.
std::vector<double> distribute(double total, int n, double base, double step, double cap) {
    std::vector<double> values(static_cast<std::size_t>(n), base);
    double remaining = total - base * n;
    long increments = std::lround(remaining / step);
    if (increments < 0) throw Error("distribute: total below base");
    std::size_t i = 0;
    while (increments > 0) {
        if (values[i] + step <= cap + 1e-9) {
            values[i] += step;
            --increments;
        }
        i = (i + 1) % values.size();
    }
    return values;
}

void fill_single_pass(std::vector<BenchRow>& rows) {
    for (int y = 0; y < 5; ++y) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].year == kYears[y]) idx.push_back(i);
        const int n = static_cast<int>(idx.size());
        const int g = kSingleGe3[y];

        // g rows pinned at >= 3, the rest capped below 3.
        std::vector<double> means(static_cast<std::size_t>(n));
        for (int i = 0; i < g; ++i) means[static_cast<std::size_t>(i)] = 3.0;
        for (int i = g; i < n; ++i) means[static_cast<std::size_t>(i)] = 1.0;
        double remaining = kSingleMeanSum[y] - 3.0 * g - 1.0 * (n - g);
        long increments = std::lround(remaining / 0.5);
        if (increments < 0) throw Error("single-pass mean targets infeasible");
        std::size_t cursor = static_cast<std::size_t>(g);
        while (increments > 0) {
            if (means[cursor] + 0.5 <= (cursor < static_cast<std::size_t>(g) ? 4.0 : 2.5) + 1e-9) {
                means[cursor] += 0.5;
                --increments;
            }
            cursor = cursor + 1 < means.size() ? cursor + 1 : static_cast<std::size_t>(0);
        }

        auto llms = distribute(kSingleLsum[y], n, 1.0, 1.0, 4.0);
        for (int i = 0; i < n; ++i) {
            BenchRow& row = rows[idx[static_cast<std::size_t>(i)]];
            row.sp_mean = means[static_cast<std::size_t>(i)];
            double integral = 0.0;
            if (std::modf(row.sp_mean, &integral) == 0.0) {
                row.sp_h1 = row.sp_h2 = static_cast<int>(integral);
            } else {
                row.sp_h1 = static_cast<int>(integral);
                row.sp_h2 = row.sp_h1 + 1;
            }
            row.sp_llm = static_cast<int>(llms[static_cast<std::size_t>(i)]);
        }
    }
}

void fill_code_scores(std::vector<BenchRow>& rows) {
    for (int y = 0; y < 5; ++y) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].year == kYears[y]) idx.push_back(i);
        auto da_rescore = distribute(kRescoreDaSum[y], static_cast<int>(idx.size()), 50.0, 0.5, 100.0);
        auto da_single = distribute(kSingleDaSum[y], static_cast<int>(idx.size()), 50.0, 0.5, 100.0);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            rows[idx[i]].da_rescore = da_rescore[i];
            rows[idx[i]].da_single = da_single[i];
        }
    }
    auto cov_rescore = distribute(kRescoreCovTotal, static_cast<int>(rows.size()), 50.0, 0.5, 100.0);
    auto cov_single = distribute(kSingleCovTotal, static_cast<int>(rows.size()), 50.0, 0.5, 100.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].cov_rescore = cov_rescore[i];
        rows[i].cov_single = cov_single[i];
    }
}

void assign_terminations(std::vector<BenchRow>& rows) {
    // 79 converged runs; 59 of the 62 near/high-fidelity rows converge, 20
    // of the below-threshold rows converge as well. Everything else exhausts.
    int ge3_converged = 0, lt3_converged = 0;
    for (auto& row : rows) {
        bool ge3 = row.h1 + row.h2 >= 6;
        if (ge3 && ge3_converged < 59) {
            row.converged = true;
            ++ge3_converged;
        } else if (!ge3 && lt3_converged < 20) {
            row.converged = true;
            ++lt3_converged;
        }
    }
    if (ge3_converged != 59 || lt3_converged != 20)
        throw Error("benchmark termination targets infeasible");
}

const char* kTitleStems[] = {
    "Safe Platooning with Control Barrier Certificates",
    "State Estimation for Networked Sensor Arrays",
    "Model Predictive Regulation of Microgrid Frequency",
    "Consensus of Heterogeneous Agents over Switching Topologies",
    "Data-Driven Stabilization with Performance Guarantees",
    "Backstepping Designs for Reaction-Diffusion Processes",
    "Dissipativity Methods for Cascaded Converters",
    "Observer-Based Fault Detection in Flexible Structures",
    "Optimization-Based Trajectory Generation for Quadrotors",
    "Distributed Coordination of Charging Fleets",
};

void write_benchmark_fixture(const fs::path& dir) {
    fs::create_directories(dir);
    auto rows = expand_bench_rows();
    assign_years(rows);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const BenchRow& a, const BenchRow& b) { return a.year < b.year; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "bm-%03zu", i + 1);
        rows[i].id = id;
    }
    fill_single_pass(rows);
    fill_code_scores(rows);
    assign_terminations(rows);

    json catalog = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
        catalog.push_back({{"paper_id", rows[i].id},
                           {"title", std::string(kTitleStems[i % 10]) + " " +
                                         std::to_string(i / 10 + 1)},
                           {"year", rows[i].year},
                           {"venue", "CDC"}});
    util::write_file(dir / "catalog.json", catalog.dump(2) + "\n");

    std::string ratings = "paper_id,condition,frs_h1,frs_h2,frs_llm\n";
    for (const auto& row : rows)
        ratings += row.id + ",single_pass," + std::to_string(row.sp_h1) + "," +
                   std::to_string(row.sp_h2) + "," + std::to_string(row.sp_llm) + "\n";
    for (const auto& row : rows)
        ratings += row.id + ",rescore," + std::to_string(row.h1) + "," + std::to_string(row.h2) +
                   "," + std::to_string(row.llm) + "\n";
    util::write_file(dir / "ratings.csv", ratings);

    std::string scores = "paper_id,condition,design_alignment,equation_coverage\n";
    for (const auto& row : rows)
        scores += row.id + ",single_pass," + util::format_fixed(row.da_single, 1) + "," +
                  util::format_fixed(row.cov_single, 1) + "\n";
    for (const auto& row : rows)
        scores += row.id + ",rescore," + util::format_fixed(row.da_rescore, 1) + "," +
                  util::format_fixed(row.cov_rescore, 1) + "\n";
    util::write_file(dir / "code_scores.csv", scores);

    std::string terminations = "paper_id,termination\n";
    for (const auto& row : rows)
        terminations += row.id + "," + (row.converged ? "converged" : "exhausted") + "\n";
    util::write_file(dir / "terminations.csv", terminations);

    std::cout << "  benchmark fixture: " << rows.size() << " papers\n";
}

// ---------------------------------------------------------------------------
// batch fixture
// ---------------------------------------------------------------------------

void write_batch_catalog(const fs::path& fixtures) {
    fs::create_directories(fixtures / "batch");
    json catalog = json::array(
        {{{"paper_id", kExhaustPaperId},
          {"title", "Output Regulation of Lightly Damped Oscillators"},
          {"year", 2022},
          {"venue", "CDC"}},
         {{"paper_id", kCccPaperId},
          {"title", "Safety Filter Design for Connected Cruise Control"},
          {"year", 2023},
          {"venue", "CDC"}},
         {{"paper_id", kOverflowPaperId},
          {"title", "Spectral Analysis of Delay Systems with Long Derivations"},
          {"year", 2024},
          {"venue", "CDC"}}});
    util::write_file(fixtures / "batch" / "catalog.json", catalog.dump(2) + "\n");
    // The overflow paper is rejected before its transcript is touched; an
    // empty cassette keeps batch replay uniform.
    util::write_file(fixtures / "transcripts" / (std::string(kOverflowPaperId) + ".json"), "[]\n");
}

} // namespace

int main(int argc, char** argv) {
    fs::path root = "tests/fixtures";
    fs::path assets;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--assets" && i + 1 < argc)
            assets = argv[++i];
        else
            root = arg;
    }

    try {
        std::cout << "writing fixtures under " << root << "\n";
        fs::create_directories(root / "transcripts");

        auto ccc = write_ccc_bundle(root / "bundles" / kCccPaperId);
        record_run_transcript(ccc, ccc_responses(), 8,
                              root / "transcripts" / (std::string(kCccPaperId) + ".json"),
                              orchestrator::Termination::Kind::converged, 2);

        auto exhaust = write_exhaust_bundle(root / "bundles" / kExhaustPaperId);
        record_run_transcript(exhaust, exhaust_responses(8), 8,
                              root / "transcripts" / (std::string(kExhaustPaperId) + ".json"),
                              orchestrator::Termination::Kind::exhausted, 8);

        write_overflow_bundle(root / "bundles" / kOverflowPaperId);
        write_batch_catalog(root);
        write_filter_fixture(root / "filter");
        write_judge_fixture(root / "judge", root / "transcripts");
        write_benchmark_fixture(root / "benchmark");

        if (!assets.empty()) {
            prompts::PromptLibrary::defaults().dump_dir(assets / "prompts");
            std::cout << "prompt assets dumped to " << assets / "prompts" << "\n";
        }
        std::cout << "done\n";
    } catch (const std::exception& e) {
        std::cerr << "fixture generation failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
