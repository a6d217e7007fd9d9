"""Top-n reporting versus per-endpoint reporting on a shared trunk.

Sixteen endpoints hang off one slow trunk. The top 16 paths overall all end
at the worst endpoint, so most failing endpoints never get a critical pin
pair. Asking each endpoint for its own worst path covers all of them.
"""

from tdplace import build_timing_graph, fixtures, report_timing, report_timing_endpoint, run_sta

design = fixtures.shared_trunk()
graph = build_timing_graph(design.netlist)
ann = run_sta(graph, design.netlist, design.constraints, design.positions)
print("failing endpoints:", len(ann.violated))

for label, rep in (("top-n", report_timing(graph, ann, 16)),
                   ("per-endpoint", report_timing_endpoint(graph, ann, 16, 1))):
    print(f"{label:13} endpoints {rep.unique_endpoints:2}  pin pairs {rep.unique_pin_pairs:3}  "
          f"candidates {rep.candidates_generated}")
