#include "hearth/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include <png.h>

namespace hearth {

namespace {

constexpr Rgb kFloorColor{196, 182, 160};
constexpr Rgb kWallColor{226, 222, 212};
constexpr Rgb kBackgroundColor{32, 34, 40};

struct Box {
  AABB box;
  std::int32_t id;
  Rgb color;
};

struct Camera {
  Vec3 eye, f, r, u;
  double focal = 0, near = 0, far = 0;
  int w = 0, h = 0;

  Vec3 to_camera(const Vec3& q) const {
    const Vec3 d = q - eye;
    return {d.dot(r), d.dot(u), d.dot(f)};
  }
};

Camera make_camera(const EnvState& st, const CameraConfig& cam) {
  Camera c;
  c.eye = st.agent.position + Vec3{0.0, cam.eye_height, 0.0};
  const double y = deg_to_rad(st.agent.yaw), p = deg_to_rad(st.agent.pitch);
  c.f = {std::sin(y) * std::cos(p), std::sin(p), std::cos(y) * std::cos(p)};
  c.r = {std::cos(y), 0.0, -std::sin(y)};
  c.u = {-std::sin(y) * std::sin(p), std::cos(p), -std::cos(y) * std::sin(p)};
  c.focal = cam.focal();
  c.near = cam.near;
  c.far = cam.far;
  c.w = cam.width;
  c.h = cam.height;
  return c;
}

std::vector<Box> scene_boxes(const EnvState& st) {
  std::vector<Box> out;
  for (const auto& room : st.scene.rooms)
    out.push_back({{{room.bounds.min_x, -0.02, room.bounds.min_z}, {room.bounds.max_x, 0.0, room.bounds.max_z}},
                   kFloorId, kFloorColor});
  for (const auto& w : wall_pieces(st.scene))
    out.push_back({{{w.min_x, 0.0, w.min_z}, {w.max_x, kWallHeight, w.max_z}}, kWallId, kWallColor});
  for (const auto& o : st.scene.objects) {
    const auto& a = st.catalog->at(o.asset);
    out.push_back({world_aabb(o, a), o.id, a.color});
  }
  return out;
}

struct ClipVert {
  double x, y, z;  // camera space
};

struct ScreenVert {
  double sx, sy, inv_z;
};

class Raster {
 public:
  Raster(const Camera& cam, bool with_rgb) : cam_(cam), with_rgb_(with_rgb) {
    const std::size_t n = static_cast<std::size_t>(cam.w) * cam.h;
    depth_.assign(n, 0.0);
    ids_.assign(n, kBackgroundId);
    if (with_rgb_) {
      rgb_.resize(n * 3);
      for (std::size_t i = 0; i < n; ++i) {
        rgb_[3 * i] = kBackgroundColor.r;
        rgb_[3 * i + 1] = kBackgroundColor.g;
        rgb_[3 * i + 2] = kBackgroundColor.b;
      }
    }
  }

  void draw(const Box& b) {
    const Vec3& lo = b.box.min;
    const Vec3& hi = b.box.max;
    const Vec3& e = cam_.eye;
    auto corner = [&](int ix, int iy, int iz) { return Vec3{ix ? hi.x : lo.x, iy ? hi.y : lo.y, iz ? hi.z : lo.z}; };
    // Faces listed with outward normals; only faces whose plane the eye is in front of are drawn.
    if (e.x > hi.x) face(b, {corner(1, 0, 0), corner(1, 1, 0), corner(1, 1, 1), corner(1, 0, 1)}, 0.8);
    if (e.x < lo.x) face(b, {corner(0, 0, 0), corner(0, 0, 1), corner(0, 1, 1), corner(0, 1, 0)}, 0.8);
    if (e.y > hi.y) face(b, {corner(0, 1, 0), corner(0, 1, 1), corner(1, 1, 1), corner(1, 1, 0)}, 1.0);
    if (e.y < lo.y) face(b, {corner(0, 0, 0), corner(1, 0, 0), corner(1, 0, 1), corner(0, 0, 1)}, 0.4);
    if (e.z > hi.z) face(b, {corner(0, 0, 1), corner(1, 0, 1), corner(1, 1, 1), corner(0, 1, 1)}, 0.6);
    if (e.z < lo.z) face(b, {corner(0, 0, 0), corner(0, 1, 0), corner(1, 1, 0), corner(1, 0, 0)}, 0.6);
  }

  std::vector<std::int32_t>& ids() { return ids_; }
  std::vector<std::uint8_t>& rgb() { return rgb_; }

 private:
  void face(const Box& b, const std::array<Vec3, 4>& quad, double brightness) {
    // Clip against the near plane (Sutherland-Hodgman).
    std::array<ClipVert, 8> in{}, out{};
    int n = 0;
    for (const auto& q : quad) {
      const Vec3 c = cam_.to_camera(q);
      in[n++] = {c.x, c.y, c.z};
    }
    int m = 0;
    for (int i = 0; i < n; ++i) {
      const ClipVert& a = in[i];
      const ClipVert& c = in[(i + 1) % n];
      const bool a_in = a.z >= cam_.near, c_in = c.z >= cam_.near;
      if (a_in) out[m++] = a;
      if (a_in != c_in) {
        const double t = (cam_.near - a.z) / (c.z - a.z);
        out[m++] = {a.x + t * (c.x - a.x), a.y + t * (c.y - a.y), cam_.near};
      }
    }
    if (m < 3) return;
    std::array<ScreenVert, 8> sv{};
    const double cx = cam_.w / 2.0, cy = cam_.h / 2.0;
    for (int i = 0; i < m; ++i) {
      const double iz = 1.0 / out[i].z;
      sv[i] = {cx + cam_.focal * out[i].x * iz, cy - cam_.focal * out[i].y * iz, iz};
    }
    const Rgb col{shade(b.color.r, brightness), shade(b.color.g, brightness), shade(b.color.b, brightness)};
    for (int i = 1; i + 1 < m; ++i) triangle(sv[0], sv[i], sv[i + 1], b.id, col);
  }

  static std::uint8_t shade(std::uint8_t c, double k) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(c * k), 0L, 255L));
  }

  void triangle(const ScreenVert& a, const ScreenVert& b, const ScreenVert& c, std::int32_t id, Rgb col) {
    const double area = (b.sx - a.sx) * (c.sy - a.sy) - (b.sy - a.sy) * (c.sx - a.sx);
    if (std::fabs(area) < 1e-12) return;
    const double min_x = std::min({a.sx, b.sx, c.sx}), max_x = std::max({a.sx, b.sx, c.sx});
    const double min_y = std::min({a.sy, b.sy, c.sy}), max_y = std::max({a.sy, b.sy, c.sy});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(cam_.w - 1, static_cast<int>(std::ceil(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(cam_.h - 1, static_cast<int>(std::ceil(max_y - 0.5)));
    if (x0 > x1 || y0 > y1) return;
    const double inv_area = 1.0 / area;
    const double min_inv_z = 1.0 / cam_.far;
    for (int py = y0; py <= y1; ++py) {
      const double y = py + 0.5;
      for (int px = x0; px <= x1; ++px) {
        const double x = px + 0.5;
        const double w0 = ((b.sx - x) * (c.sy - y) - (b.sy - y) * (c.sx - x)) * inv_area;
        const double w1 = ((c.sx - x) * (a.sy - y) - (c.sy - y) * (a.sx - x)) * inv_area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0 || w1 < 0 || w2 < 0) continue;
        const double iz = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
        if (iz < min_inv_z) continue;
        const std::size_t idx = static_cast<std::size_t>(py) * cam_.w + px;
        if (iz <= depth_[idx]) continue;
        depth_[idx] = iz;
        ids_[idx] = id;
        if (with_rgb_) {
          rgb_[3 * idx] = col.r;
          rgb_[3 * idx + 1] = col.g;
          rgb_[3 * idx + 2] = col.b;
        }
      }
    }
  }

  const Camera& cam_;
  bool with_rgb_;
  std::vector<double> depth_;
  std::vector<std::int32_t> ids_;
  std::vector<std::uint8_t> rgb_;
};

void draw_all(Raster& r, const std::vector<Box>& boxes) {
  for (const auto& b : boxes) r.draw(b);
}

double distance_to_box(const Vec3& p, const AABB& b) {
  const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x});
  const double dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
  const double dz = std::max({b.min.z - p.z, 0.0, p.z - b.max.z});
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// ---------------------------------------------------------------- PNG

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::string out;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_write_struct failed");
    info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw Error("png_create_info_struct failed");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }

  static void write_fn(png_structp p, png_bytep data, png_size_t len) {
    auto* self = static_cast<PngWriter*>(png_get_io_ptr(p));
    self->out.append(reinterpret_cast<const char*>(data), len);
  }
  static void flush_fn(png_structp) {}

  std::string encode(int w, int h, int color_type, int depth, const std::vector<png_bytep>& rows) {
    if (setjmp(png_jmpbuf(png))) throw Error("PNG encoding failed");
    png_set_write_fn(png, this, &write_fn, &flush_fn);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    return std::move(out);
  }
};

}  // namespace

void CameraConfig::validate() const {
  if (width < 16 || height < 16) throw Error("camera resolution must be at least 16x16");
  if (!(horizontal_fov >= 30 && horizontal_fov <= 120)) throw Error("horizontal fov must lie in [30, 120] degrees");
  if (!(near > 0 && far > near)) throw Error("camera clip planes must satisfy 0 < near < far");
}

double CameraConfig::focal() const { return (width / 2.0) / std::tan(deg_to_rad(horizontal_fov) / 2.0); }

Frame render_egocentric(const EnvState& st, const CameraConfig& cam) {
  cam.validate();
  const Camera c = make_camera(st, cam);
  Raster r(c, true);
  draw_all(r, scene_boxes(st));
  Frame f;
  f.width = cam.width;
  f.height = cam.height;
  f.rgb = std::move(r.rgb());
  f.instance = std::move(r.ids());
  return f;
}

std::vector<std::int32_t> render_instances(const EnvState& st, const CameraConfig& cam) {
  cam.validate();
  const Camera c = make_camera(st, cam);
  Raster r(c, false);
  draw_all(r, scene_boxes(st));
  return std::move(r.ids());
}

bool visible(const EnvState& st, ObjectId id, const CameraConfig& cam) {
  const auto* obj = st.scene.find_object(id);
  if (!obj) throw Error("unknown object id " + std::to_string(id));
  const AABB box = world_aabb(*obj, st.catalog->at(obj->asset));
  CameraConfig low = cam;
  low.width = kVisibilityResolution;
  low.height = kVisibilityResolution;
  const Camera c = make_camera(st, low);
  if (distance_to_box(c.eye, box) > kVisibleRange) return false;
  // Entirely behind the near plane: nothing to rasterize.
  bool any_front = false;
  for (int i = 0; i < 8 && !any_front; ++i) {
    const Vec3 q{i & 1 ? box.max.x : box.min.x, i & 2 ? box.max.y : box.min.y, i & 4 ? box.max.z : box.min.z};
    any_front = c.to_camera(q).z >= c.near;
  }
  if (!any_front) return false;
  const auto ids = render_instances(st, low);
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string encode_png(const Frame& f) {
  PngWriter w;
  std::vector<png_bytep> rows(static_cast<std::size_t>(f.height));
  for (int y = 0; y < f.height; ++y)
    rows[y] = const_cast<png_bytep>(f.rgb.data() + static_cast<std::size_t>(y) * f.width * 3);
  return w.encode(f.width, f.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

std::string encode_instance_png(const Frame& f) {
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(f.width) * f.height * 2);
  for (std::size_t i = 0; i < f.instance.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(std::clamp(f.instance[i] + 3, 0, 65535));
    buf[2 * i] = static_cast<std::uint8_t>(v >> 8);
    buf[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
  }
  PngWriter w;
  std::vector<png_bytep> rows(static_cast<std::size_t>(f.height));
  for (int y = 0; y < f.height; ++y) rows[y] = buf.data() + static_cast<std::size_t>(y) * f.width * 2;
  return w.encode(f.width, f.height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

DecodedImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw Error("not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Source {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;
  } src{bytes};
  DecodedImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("PNG decoding failed");
  }
  png_set_read_fn(png, &src, [](png_structp p, png_bytep out, png_size_t len) {
    auto* s = static_cast<Source*>(png_get_io_ptr(p));
    if (s->pos + len > s->data.size()) png_error(p, "truncated PNG");
    std::memcpy(out, s->data.data() + s->pos, len);
    s->pos += len;
  });
  png_read_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  img.pixels.resize(stride * img.height);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

DecodedImage decode_png(const std::string& bytes) {
  return decode_png(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace hearth
