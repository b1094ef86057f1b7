if __name__ == "__main__":
    from photon_scintillation.cli.main import main

    main()
