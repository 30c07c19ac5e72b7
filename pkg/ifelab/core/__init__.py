# Linear algebra, bipartite model, time evolution
