#include <gtest/gtest.h>

#include <sstream>

#include "imufresh/error.hpp"
#include "imufresh/text.hpp"
#include "imufresh/timeseries.hpp"

using namespace imufresh;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an imufresh::Error";
  return ErrorCode::IoError;
}

Recording from_csv(const std::string& text) {
  std::istringstream in(text);
  return load_recording_csv(in);
}

std::string grid_csv(std::size_t kinds, std::size_t rows, double dt) {
  std::ostringstream out;
  out << "time,kind,value\n";
  for (std::size_t k = 0; k < kinds; ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      out << format_double(static_cast<double>(i) * dt) << ",ch" << k << ',' << (static_cast<double>(i) * 0.5 + k)
          << '\n';
    }
  }
  return out.str();
}

Recording ramp(double seconds, double rate) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  Channels ch;
  ch.emplace(ChannelKind("accel_x_l"), v);
  return Recording(rate, 0.0, std::move(ch));
}

}  // namespace

TEST(ChannelKind, Validation) {
  EXPECT_TRUE(ChannelKind::is_valid("accel_y_r"));
  EXPECT_TRUE(ChannelKind::is_valid("gyro_z_l"));
  EXPECT_FALSE(ChannelKind::is_valid("accel__y"));
  EXPECT_FALSE(ChannelKind::is_valid(""));
  EXPECT_FALSE(ChannelKind::is_valid("_x"));
  EXPECT_FALSE(ChannelKind::is_valid("x_"));
  EXPECT_FALSE(ChannelKind::is_valid("a-b"));
  EXPECT_EQ(code_of([] { ChannelKind("accel__y"); }), ErrorCode::InvalidKindName);
}

TEST(LoadRecording, ThreeKindsAt500Hz) {
  const Recording rec = from_csv(grid_csv(3, 2000, 0.002));
  EXPECT_EQ(rec.sample_rate_hz(), 500.0);
  EXPECT_EQ(rec.length(), 2000u);
  EXPECT_EQ(rec.channels().size(), 3u);
}

TEST(LoadRecording, SingleKindIdentity) {
  const Recording rec = from_csv("time,kind,value\n0.0,acc,1.0\n0.002,acc,2.0");
  EXPECT_EQ(rec.sample_rate_hz(), 500.0);
  const auto ch = rec.channel(ChannelKind("acc"));
  ASSERT_EQ(ch.size(), 2u);
  EXPECT_EQ(ch[0], 1.0);
  EXPECT_EQ(ch[1], 2.0);
}

TEST(LoadRecording, Errors) {
  EXPECT_EQ(code_of([] { from_csv("time,kind,value\n0,accel__y,1\n0.1,accel__y,2\n"); }), ErrorCode::InvalidKindName);
  EXPECT_EQ(code_of([] { from_csv("time,kind,value\n0,a,1\n0.1,a,2\n0,b,1\n"); }), ErrorCode::InconsistentChannels);
  EXPECT_EQ(code_of([] { from_csv("time,kind,value\n0,a,1\n0.1,a,2\n0.3,a,2\n"); }), ErrorCode::NonUniformSampling);
  EXPECT_EQ(code_of([] { from_csv("time,kind,value\n0,a,1\n0.1,a,nan\n"); }), ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { from_csv("time,kind,value\n0,a,1\n0.1,a,inf\n"); }), ErrorCode::InvalidValue);
  EXPECT_EQ(code_of([] { from_csv("t,kind,value\n0,a,1\n"); }), ErrorCode::MalformedCsv);
}

TEST(LoadRecording, CrlfAndNoTrailingNewline) {
  const Recording rec = from_csv("time,kind,value\r\n0,a,1\r\n0.5,a,3");
  EXPECT_EQ(rec.sample_rate_hz(), 2.0);
  EXPECT_EQ(rec.length(), 2u);
}

TEST(LoadRecording, RoundTripIsExact) {
  Channels ch;
  ch.emplace(ChannelKind("a"), std::vector<double>{0.1, -1e-17, 3.141592653589793, 1e300});
  ch.emplace(ChannelKind("b"), std::vector<double>{1.0 / 3.0, 2.0, -0.0, 5e-324});
  const Recording rec(500.0, 0.0, ch);
  std::ostringstream out;
  write_recording_csv(rec, out);
  const Recording back = from_csv(out.str());
  EXPECT_EQ(back, rec);
}

TEST(Segment, FiveHundredHertzSectionCount) {
  // 560 s at 500 Hz in 4 s sections.
  const Recording rec = ramp(560.0, 500.0);
  const WindowSet ws = segment_fixed(rec, 4.0, {});
  EXPECT_EQ(ws.windows.size(), 140u);
  for (const auto& w : ws.windows) EXPECT_EQ(w.length, 2000u);
}

TEST(Segment, ExactTiling) {
  const Recording rec = ramp(8.0, 100.0);
  const std::vector<LabelInterval> labels{{0, 4, "walk"}, {4, 8, "run"}};
  const WindowSet ws = segment_fixed(rec, 4.0, labels);
  ASSERT_EQ(ws.windows.size(), 2u);
  EXPECT_EQ(*ws.windows[0].label, "walk");
  EXPECT_EQ(*ws.windows[1].label, "run");
  EXPECT_EQ(ws.label_domain, (std::set<std::string>{"run", "walk"}));
  EXPECT_TRUE(ws.unlabeled.empty());
}

TEST(Segment, BoundaryTruncation) {
  const Recording rec = ramp(6.0, 100.0);
  const std::vector<LabelInterval> labels{{0, 6, "walk"}};
  const WindowSet ws = segment_fixed(rec, 4.0, labels);
  EXPECT_EQ(ws.windows.size(), 1u);
  EXPECT_TRUE(ws.unlabeled.empty());
}

TEST(Segment, StraddlingWindowsGoToUnlabeled) {
  const Recording rec = ramp(12.0, 100.0);
  const std::vector<LabelInterval> labels{{0, 6, "walk"}, {6, 12, "run"}};
  const WindowSet ws = segment_fixed(rec, 4.0, labels);
  ASSERT_EQ(ws.windows.size(), 2u);
  ASSERT_EQ(ws.unlabeled.size(), 1u);
  EXPECT_EQ(ws.unlabeled[0].window_id, 1);
  EXPECT_EQ(ws.all_windows().size(), 3u);
}

TEST(Segment, Errors) {
  const Recording rec = ramp(8.0, 100.0);
  EXPECT_EQ(code_of([&] { segment_fixed(rec, 0.01, {}); }), ErrorCode::WindowTooShort);
  const std::vector<LabelInterval> overlap{{0, 5, "walk"}, {4, 8, "run"}};
  EXPECT_EQ(code_of([&] { segment_fixed(rec, 4.0, overlap); }), ErrorCode::OverlappingLabels);
}

TEST(Segment, DeterministicAndDisjoint) {
  const Recording rec = ramp(37.3, 50.0);
  const std::vector<LabelInterval> labels{{0, 10, "a"}, {10, 20, "b"}, {25, 37.3, "a"}};
  const WindowSet a = segment_fixed(rec, 3.0, labels);
  const WindowSet b = segment_fixed(rec, 3.0, labels);
  EXPECT_EQ(a, b);
  const auto all = a.all_windows();
  std::size_t covered = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    covered += all[i].length;
    if (i > 0) EXPECT_GE(all[i].start_index, all[i - 1].start_index + all[i - 1].length);
  }
  EXPECT_LE(covered, rec.length());
}

TEST(SliceWindow, Basics) {
  Channels ch;
  ch.emplace(ChannelKind("a"), std::vector<double>{1, 2, 3, 4});
  const Recording rec(1.0, 0.0, ch);
  const auto s = slice_window(rec, Window{0, 1, 2, {}}, ChannelKind("a"));
  EXPECT_EQ(std::vector<double>(s.begin(), s.end()), (std::vector<double>{2, 3}));
  const auto full = slice_window(rec, Window{0, 0, 4, {}}, ChannelKind("a"));
  EXPECT_EQ(full.size(), 4u);
  EXPECT_EQ(code_of([&] { slice_window(rec, Window{0, 3, 5, {}}, ChannelKind("a")); }), ErrorCode::WindowOutOfRange);
  EXPECT_EQ(code_of([&] { slice_window(rec, Window{0, 0, 2, {}}, ChannelKind("b")); }), ErrorCode::UnknownKind);
}

TEST(LabelsCsv, RoundTrip) {
  std::istringstream in("start_s,end_s,label\n0,4,walk\n4,8.5,run\n");
  const auto labels = load_labels_csv(in);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[1].end_s, 8.5);
  EXPECT_EQ(labels[1].label, "run");
  std::ostringstream out;
  write_labels_csv(labels, out);
  EXPECT_EQ(out.str(), "start_s,end_s,label\n0,4,walk\n4,8.5,run\n");
}
