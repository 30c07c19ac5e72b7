from ifelab.main import main

raise SystemExit(main())
