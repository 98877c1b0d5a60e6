#pragma once

// Two-dimensional figures: model comparisons, transport on the sphere, and
// walk diagrams. A Figure is plain data in model coordinates so tests can
// inspect what gets drawn; rasterize() and toSvg() only lay it out.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperspace/geometry.hpp"
#include "hyperspace/image.hpp"

namespace hyperspace {

enum class FigureKind { Models2d, SphereTransport, LoopPanels, TransportCycle };
std::string_view toString(FigureKind kind);
FigureKind parseFigureKind(std::string_view text);

struct Curve {
    std::vector<Vec2> points;
    Rgb color{30, 30, 30};
    std::string role;  // e.g. "line", "parallel", "path"
};

struct Arrow {
    Vec2 tail = Vec2::Zero();
    Vec2 head = Vec2::Zero();
    Rgb color{200, 40, 40};
};

struct Panel {
    std::string title;
    Vec2 lower{-1.0, -1.0};  // model-coordinate window
    Vec2 upper{1.0, 1.0};
    bool unitCircle = false; // draw the boundary circle
    bool baseline = false;   // draw the y = 0 line (half-plane boundary)
    std::vector<Curve> curves;
    std::vector<Arrow> arrows;
    std::vector<Vec2> dots;
};

struct Figure {
    std::vector<Panel> panels;
    int panelSize = 400;  // pixels per panel side
    int margin = 20;
    std::map<std::string, double> measurements;

    int width() const { return static_cast<int>(panels.size()) * (panelSize + margin) + margin; }
    int height() const { return panelSize + 2 * margin; }
    /// Pixel position of a model point in panel `index` (y grows downward).
    Vec2 toPixel(std::size_t index, const Vec2& model) const;
};

struct Models2dParams {
    Vec2 lineA{-0.5, -0.3};  // two points of the line L, Klein coordinates
    Vec2 lineB{0.6, -0.2};
    Vec2 point{0.1, 0.4};    // p, off L
    int parallels = 7;       // fan size, limiting parallels included
    std::vector<Model> models{Model::Klein, Model::Poincare, Model::HalfSpace};
    int samples = 401;       // points per geodesic
    double reach = 9.0;      // geodesics are sampled for |t| <= reach
};

Figure models2dFigure(const Models2dParams& params, int panelSize = 400);
/// Octant loop on the unit sphere with the transported arrow.
Figure sphereTransportFigure(int panelSize = 400);
/// The same loops in H^3, H^2 x E (vertical and horizontal) and Euclidean space.
Figure loopPanelsFigure(double length = 0.5, int panelSize = 400);
/// Square walks in the flat room, in the hyperbolic plane, and on the grid.
Figure transportCycleFigure(int panelSize = 400);

/// models2d draws every model unless one is given.
Figure makeFigure(FigureKind kind, std::optional<Model> model = std::nullopt, int panelSize = 400);

Image rasterize(const Figure& figure);
std::string toSvg(const Figure& figure);

}  // namespace hyperspace
