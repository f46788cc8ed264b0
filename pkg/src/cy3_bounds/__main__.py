from cy3_bounds.cli import main

if __name__ == "__main__":
    main()
