from diagdensity.cli import main

main()
