"""Build each neighbourhood topology on a small grid and compare the
shortest-path metrics that fall out of the wiring.

    python3 demos/03_topologies.py
"""

from mppsoc import Neighborhood, build_topology, route_distance


def describe(kind, rows, cols):
    graph = build_topology(kind, rows, cols)
    degrees = [graph.degree(i) for i in range(graph.n_pes)]
    corner = graph.pe_at(0, 0)
    far = graph.pe_at(rows - 1, cols - 1)
    print(f"{kind.value:8s} {rows}x{cols}: {len(graph.edges()):3d} edges, "
          f"degree {min(degrees)}..{max(degrees)}, "
          f"corner-to-corner distance {route_distance(graph, corner, far)}")


def main():
    describe(Neighborhood.LINEAR, 1, 16)
    describe(Neighborhood.RING, 1, 16)
    describe(Neighborhood.MESH2D, 4, 4)
    describe(Neighborhood.TORUS2D, 4, 4)
    describe(Neighborhood.XNET, 4, 4)

    print("\n4x4 mesh adjacency as an edge list (u v label):")
    print(build_topology(Neighborhood.MESH2D, 4, 4).edge_list_text())


if __name__ == "__main__":
    main()
