from compressed_ising.cli import main

raise SystemExit(main())
