"""Drive the command line interface in process and look at what it writes.

Same entry point as the installed `psfront` command. Everything lands in
./demo_out: inspect the OBJ in any mesh viewer, the CSV in anything that
reads tables.
"""

import pathlib

from psfront.cli import main, read_ply

out = pathlib.Path("demo_out")

main(["generate", "--preset", "pseudosphere", "--grid", "65",
      "--lambda", "0.5,1,2", "--out", str(out)])

main(["export", "--preset", "pseudosphere", "--grid", "65", "--format", "csv",
      "--glyphs", "--curves", "--out", str(out)])

main(["generate", "--preset", "c0_kink", "--amplitude", "0.75", "--grid", "65",
      "--format", "ply", "--out", str(out)])

verts, faces = read_ply(out / "c0_kink0.75_lam1_n65.ply")
print(f"kink mesh: {len(verts)} vertices, {len(faces)} quads")

rc = main(["verify", "--preset", "pseudosphere", "--grid", "129",
           "--out", str(out)])
print(f"verify exit code: {rc}")

print("\nfiles written:")
for p in sorted(out.iterdir()):
    print(f"  {p.name}  ({p.stat().st_size} bytes)")
