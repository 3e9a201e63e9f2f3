from motivica.cli import main

main()
